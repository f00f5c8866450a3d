"""Recursive decoders over real-valued channel estimates.

Two successive-cancellation style algorithms share one recursion.  At a
node of length w the received block y = (y', y'') is first reduced to a
channel estimate y^v = y' * y'' for the v constituent; once v is decoded,
both halves are combined into an estimate of u, either as the midpoint
(y' + y''*v_hat)/2 (scaled rule, keeps values in [-1, +1]) or without the
halving (unscaled rule, same decisions, fewer operations).  The psi
variant recurses until repetition {g,0} and full-space {h,h} nodes, where
it applies exact minimum-distance decisions; the phi variant stops one
level earlier, decoding each first-order (biorthogonal) node {g+1,1} as a
whole with a fast Hadamard transform.

Operation counting: every real addition, multiplication, comparison and
sign evaluation costs one unit.  A Hadamard butterfly stage costs two per
element pair.  Re-assembly of +/-1 code symbols (u*v products, info-bit
bookkeeping) is symbol manipulation, not channel arithmetic, and is not
counted.  Under this convention the counts never exceed the closed-form
bounds in :func:`decode_op_bound`.

Ties: sign(0) is resolved either by a seeded +/-1 coin or deterministically
as +1.  Every potential sign evaluation has a fixed site index (the
recursion is data independent), and the random coin is a pure hash of
(seed, trial, site), so results are reproducible under any batching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CodeParams,
    Path,
    classify_path,
    enumerate_paths,
    extract_info_batch,
)

ALG_PSI = "psi"
ALG_PHI = "phi"

SCALED = "scaled"
UNSCALED = "unscaled"
PRODUCT = "product"
MIN_SUM = "min-sum"
TIE_RANDOM = "random"
TIE_POSITIVE = "positive"

__all__ = [
    "ALG_PSI",
    "ALG_PHI",
    "SCALED",
    "UNSCALED",
    "PRODUCT",
    "MIN_SUM",
    "TIE_RANDOM",
    "TIE_POSITIVE",
    "DecoderOptions",
    "DecodeResult",
    "PathTrace",
    "GenieTrace",
    "recalc_v",
    "recalc_u",
    "md_repetition",
    "md_full_space",
    "md_biorthogonal",
    "hadamard_transform",
    "biorthogonal_codeword",
    "biorthogonal_codebook",
    "decode_psi",
    "decode_phi",
    "decode_batch",
    "genie_decode",
    "genie_batch",
    "decode_op_bound",
]


@dataclass(frozen=True)
class DecoderOptions:
    """Rule selection for the recursive decoders.

    u_rule: SCALED midpoint (y' + y''*v_hat)/2 or UNSCALED sum; decisions
        are identical, only intermediate magnitudes and op counts differ.
        Unscaled magnitudes grow as 2^((m-r) 2^r) in the worst case and
        overflow to inf once min(r, m-r) reaches about 9; signs (hence
        noiseless decisions) survive, but noisy inputs on such deep codes
        should use the scaled rule.
    v_rule: PRODUCT estimate y'*y'' or the MIN_SUM variant
        sign(y'*y'') * min(|y'|, |y''|).
    tie_rule: TIE_RANDOM draws a seeded +/-1 coin for sign(0); TIE_POSITIVE
        resolves to +1 (deterministic mode for reproducible unit tests).
    tie_seed: seed of the tie coin; combined with the per-call trial index.
    trace: record end values, decisions, and decision order per path.
    """

    u_rule: str = SCALED
    v_rule: str = PRODUCT
    tie_rule: str = TIE_RANDOM
    tie_seed: int = 0
    trace: bool = False

    def __post_init__(self) -> None:
        if self.u_rule not in (SCALED, UNSCALED):
            raise ValueError(f"unknown u_rule {self.u_rule!r}")
        if self.v_rule not in (PRODUCT, MIN_SUM):
            raise ValueError(f"unknown v_rule {self.v_rule!r}")
        if self.tie_rule not in (TIE_RANDOM, TIE_POSITIVE):
            raise ValueError(f"unknown tie_rule {self.tie_rule!r}")


@dataclass
class PathTrace:
    """End value, +/-1 decision, and finalization rank of one path."""

    value: float
    decision: int
    order: int


@dataclass
class DecodeResult:
    """Decoded info bits, the matching codeword, and the operation count."""

    info: np.ndarray
    codeword: np.ndarray
    op_count: int
    trace: dict[Path, PathTrace] | None = None


@dataclass
class GenieTrace:
    """Per-path end values of the genie-aided recursion (all-ones truth).

    support_sums holds, for every first-order node reached by the given
    descent prefix, the sum of the node's values over the canonical
    half-block support (the support of the codeword that flips exactly
    the second half).
    """

    end_values: dict[Path, float]
    support_sums: dict[tuple[int, ...], float]


# --- tie randomness ---------------------------------------------------------

_MIX_A = np.uint64(0x9E3779B97F4A7C15)
_MIX_B = np.uint64(0xC2B2AE3D27D4EB4F)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _tie_signs(seed: int, trials: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """+/-1 coins that depend only on (seed, trial, site)."""
    h = _mix64(trials.astype(np.uint64) * _MIX_A
               ^ sites.astype(np.uint64) * _MIX_B
               ^ np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    return np.where((h >> np.uint64(63)).astype(bool), -1.0, 1.0)


class _Context:
    """Mutable per-decode state: op/site counters, tie source, trace."""

    __slots__ = ("options", "phi", "trials", "ops", "site", "order",
                 "trace", "params")

    def __init__(self, options: DecoderOptions, phi: bool,
                 trials: np.ndarray, params: CodeParams,
                 trace: bool) -> None:
        self.options = options
        self.phi = phi
        self.trials = trials
        self.params = params
        self.ops = 0
        self.site = 0
        self.order = 0
        self.trace: dict[Path, PathTrace] | None = {} if trace else None

    def signs(self, values: np.ndarray) -> np.ndarray:
        """Componentwise sign with tie resolution; consumes one site per
        column so site indices stay aligned whether or not ties occur."""
        out = np.sign(values)
        width = values.shape[1]
        zero = out == 0.0
        if zero.any():
            if self.options.tie_rule == TIE_POSITIVE:
                out[zero] = 1.0
            else:
                rows, cols = np.nonzero(zero)
                out[rows, cols] = _tie_signs(self.options.tie_seed,
                                             self.trials[rows],
                                             np.uint64(self.site) + cols.astype(np.uint64))
        self.site += width
        return out

    def record(self, bits: tuple[int, ...], value: float, decision: int) -> None:
        path = classify_path(self.params, bits)
        assert self.trace is not None
        self.trace[path] = PathTrace(value, decision, self.order)
        self.order += 1


# --- recalculation rules ----------------------------------------------------

def recalc_v(y1: np.ndarray, y2: np.ndarray, v_rule: str = PRODUCT) -> np.ndarray:
    """Channel estimate of the v constituent from the two halves.

    PRODUCT: y1*y2 (len multiplications).  MIN_SUM: sign(y1*y2) *
    min(|y1|, |y2|) (3*len operations).
    """
    y1, y2 = np.asarray(y1, dtype=np.float64), np.asarray(y2, dtype=np.float64)
    if y1.shape != y2.shape:
        raise ValueError(f"length mismatch: {y1.shape} vs {y2.shape}")
    if v_rule == PRODUCT:
        return y1 * y2
    if v_rule == MIN_SUM:
        return np.sign(y1) * np.sign(y2) * np.minimum(np.abs(y1), np.abs(y2))
    raise ValueError(f"unknown v_rule {v_rule!r}")


def recalc_u(y1: np.ndarray, y2: np.ndarray, v_hat: np.ndarray,
             u_rule: str = SCALED) -> np.ndarray:
    """Combine both halves into an estimate of u given the decoded v.

    SCALED: (y1 + y2*v_hat)/2, which maps [-1,+1] inputs back into
    [-1,+1] (3*len operations).  UNSCALED: y1 + y2*v_hat (2*len); all
    downstream decisions are invariant under the positive scaling.
    """
    y1, y2 = np.asarray(y1, dtype=np.float64), np.asarray(y2, dtype=np.float64)
    v_hat = np.asarray(v_hat, dtype=np.float64)
    if y1.shape != y2.shape or y1.shape != v_hat.shape:
        raise ValueError("recalc_u requires equal-length blocks")
    if not np.all(np.abs(v_hat) == 1):
        raise ValueError("v_hat entries must be +1 or -1")
    if u_rule == SCALED:
        return (y1 + y2 * v_hat) * 0.5
    if u_rule == UNSCALED:
        return y1 + y2 * v_hat
    raise ValueError(f"unknown u_rule {u_rule!r}")


# --- fast Hadamard transform ------------------------------------------------

def hadamard_transform(x: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis (length a power of two).

    Output index j holds sum_i x[i] * (-1)^popcount(i & j), i.e. the
    correlations of x with every linear +/-1 pattern.
    """
    x = np.asarray(x, dtype=np.float64)
    width = x.shape[-1]
    if width & (width - 1):
        raise ValueError(f"length must be a power of two, got {width}")
    out = x.copy()
    lead = out.shape[:-1]
    h = 1
    while h < width:
        out = out.reshape(lead + (width // (2 * h), 2, h))
        a = out[..., 0, :].copy()
        b = out[..., 1, :]
        out[..., 0, :] = a + b
        out[..., 1, :] = a - b
        out = out.reshape(lead + (width,))
        h *= 2
    return out


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.int8)


def biorthogonal_codeword(pattern: np.ndarray | int, width: int) -> np.ndarray:
    """+/-1 rows of the width x width Hadamard matrix, one per pattern index."""
    pattern = np.atleast_1d(np.asarray(pattern, dtype=np.int64))
    positions = np.arange(width, dtype=np.int64)
    return 1.0 - 2.0 * _parity(pattern[:, None] & positions[None, :])


def biorthogonal_codebook(g: int) -> np.ndarray:
    """All 2l codewords of the length l = 2^(g+1) first-order code.

    Row order is the tie-breaking index: the all-ones word first, its
    negation second, then the +/- pair of every balanced pattern in
    ascending pattern order.  Rows beyond the first two all have exactly
    2^g entries equal to -1.
    """
    if g < 0:
        raise ValueError("g must be nonnegative")
    width = 1 << (g + 1)
    rows = biorthogonal_codeword(np.arange(width), width)
    book = np.empty((2 * width, width))
    book[0::2] = rows
    book[1::2] = -rows
    return book


# --- end-node decisions -----------------------------------------------------

def _single_context(params: CodeParams, options: DecoderOptions, trial: int,
                    phi: bool = False, trace: bool = False) -> _Context:
    trials = np.asarray([trial], dtype=np.uint64)
    return _Context(options, phi, trials, params, trace)


def md_repetition(z: np.ndarray, options: DecoderOptions | None = None,
                  trial: int = 0) -> tuple[int, float]:
    """Minimum-distance decision for a repetition block.

    Returns (+/-1 decision, end value), the end value being the block mean.
    """
    z = np.asarray(z, dtype=np.float64).reshape(1, -1)
    if z.shape[1] == 0:
        raise ValueError("empty block")
    options = options or DecoderOptions()
    ctx = _single_context(CodeParams(1, 0), options, trial)
    total = z.sum(axis=1, keepdims=True)
    decision = ctx.signs(total)[0, 0]
    return int(decision), float(total[0, 0] / z.shape[1])


def md_full_space(z: np.ndarray, options: DecoderOptions | None = None,
                  trial: int = 0) -> np.ndarray:
    """Componentwise sign decision, exact MD decoding for a full space."""
    z = np.asarray(z, dtype=np.float64).reshape(1, -1)
    if z.shape[1] == 0:
        raise ValueError("empty block")
    options = options or DecoderOptions()
    ctx = _single_context(CodeParams(1, 1), options, trial)
    return ctx.signs(z)[0].astype(np.int8)


def md_biorthogonal(z: np.ndarray, g: int, options: DecoderOptions | None = None,
                    trial: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """MD decoding of a first-order block of length l = 2^(g+1) via the FHT.

    Returns (codeword, info bits).  The winner maximizes the inner product
    over all 2l codewords; among equal-magnitude correlations the lowest
    pattern index wins, and an exactly zero winning correlation falls back
    to the tie rule for its sign.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (1 << (g + 1),):
        raise ValueError(f"block length must be 2^(g+1)={1 << (g + 1)}")
    options = options or DecoderOptions()
    ctx = _single_context(CodeParams(g + 1, 1), options, trial, phi=True)
    info, cw = _decode_biorthogonal(z.reshape(1, -1), g + 1, ctx, ())
    return cw[0].astype(np.int8), info[0]


def _decode_biorthogonal(y: np.ndarray, length_log: int, ctx: _Context,
                         prefix: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    width = 1 << length_log
    corr = hadamard_transform(y)
    ctx.ops += width * length_log  # two ops per butterfly pair, width/2 pairs a stage
    magnitude = np.abs(corr)
    best = np.argmax(magnitude, axis=1)  # first (lowest-index) maximum wins
    winning = np.take_along_axis(corr, best[:, None], axis=1)
    sign = ctx.signs(winning)
    ctx.ops += 2 * width  # width magnitudes, width-1 comparisons, one sign
    cw = sign * biorthogonal_codeword(best, width)
    info = extract_info_batch(cw, length_log, 1)
    if ctx.trace is not None:
        sub_params = CodeParams(length_log, 1)
        score = float(winning[0, 0] * sign[0, 0] / width)
        for j, sub in enumerate(enumerate_paths(sub_params)):
            bits = prefix + sub.bits
            ctx.record(bits, score, int(1 - 2 * info[0, j]))
    return info, cw


# --- the shared recursion ---------------------------------------------------

def _decode_rec(y: np.ndarray, length_log: int, order: int, ctx: _Context,
                prefix: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    width = 1 << length_log
    if order == length_log:
        cw = ctx.signs(y)
        ctx.ops += width
        info = (cw < 0).astype(np.uint8)
        if ctx.trace is not None:
            for j in range(width):
                suffix = tuple((j >> (length_log - 1 - t)) & 1 for t in range(length_log))
                ctx.record(prefix + suffix, float(y[0, j]), int(cw[0, j]))
        return info, cw
    if order == 0:
        total = y.sum(axis=1, keepdims=True)
        ctx.ops += width  # width-1 additions plus the sign evaluation
        decision = ctx.signs(total)
        info = (decision < 0).astype(np.uint8)
        cw = np.repeat(decision, width, axis=1)
        if ctx.trace is not None:
            ctx.record(prefix + (1,) * length_log,
                       float(total[0, 0] / width), int(decision[0, 0]))
        return info, cw
    if ctx.phi and order == 1:
        return _decode_biorthogonal(y, length_log, ctx, prefix)

    half = width // 2
    y1, y2 = y[:, :half], y[:, half:]
    if ctx.options.v_rule == PRODUCT:
        yv = y1 * y2
        ctx.ops += half
    else:
        yv = np.sign(y1) * np.sign(y2) * np.minimum(np.abs(y1), np.abs(y2))
        ctx.ops += 3 * half
    info_v, cw_v = _decode_rec(yv, length_log - 1, order - 1, ctx, prefix + (0,))
    if ctx.options.u_rule == SCALED:
        yu = (y1 + y2 * cw_v) * 0.5
        ctx.ops += 3 * half
    else:
        yu = y1 + y2 * cw_v
        ctx.ops += 2 * half
    info_u, cw_u = _decode_rec(yu, length_log - 1, order, ctx, prefix + (1,))
    info = np.concatenate([info_v, info_u], axis=1)
    cw = np.concatenate([cw_u, cw_u * cw_v], axis=1)  # symbol re-assembly, uncounted
    return info, cw


def decode_batch(y: np.ndarray, params: CodeParams, algorithm: str = ALG_PSI,
                 options: DecoderOptions | None = None,
                 trials: np.ndarray | None = None,
                 ) -> tuple[np.ndarray, np.ndarray, int]:
    """Decode a (B, n) batch of real blocks; rows are independent trials.

    Returns (info bits (B, k), codewords (B, n), op count per block).
    `trials` supplies the per-row trial indices for the tie coin.
    """
    options = options or DecoderOptions()
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.shape[1] != params.n:
        raise ValueError(f"blocks must have length n={params.n}, got {y.shape[1]}")
    if algorithm not in (ALG_PSI, ALG_PHI):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if algorithm == ALG_PHI and params.r == 0:
        raise ValueError("phi requires r >= 1; use psi for repetition codes")
    if trials is None:
        trials = np.arange(y.shape[0], dtype=np.uint64)
    else:
        trials = np.asarray(trials, dtype=np.uint64)
        if trials.shape != (y.shape[0],):
            raise ValueError("trials must hold one index per row")
    ctx = _Context(options, algorithm == ALG_PHI, trials, params, trace=False)
    with np.errstate(over="ignore"):  # unscaled intermediates may reach inf
        info, cw = _decode_rec(y, params.m, params.r, ctx, ())
    return info, cw, ctx.ops


def _decode_single(y: np.ndarray, params: CodeParams, algorithm: str,
                   options: DecoderOptions | None, trial: int) -> DecodeResult:
    options = options or DecoderOptions()
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (params.n,):
        raise ValueError(f"received block must have length n={params.n}")
    if algorithm == ALG_PHI and params.r == 0:
        raise ValueError("phi requires r >= 1; use psi for repetition codes")
    ctx = _Context(options, algorithm == ALG_PHI,
                   np.asarray([trial], dtype=np.uint64), params,
                   trace=options.trace)
    with np.errstate(over="ignore"):  # unscaled intermediates may reach inf
        info, cw = _decode_rec(y[None, :], params.m, params.r, ctx, ())
    return DecodeResult(info[0], cw[0].astype(np.int8), ctx.ops, ctx.trace)


def decode_psi(y: np.ndarray, params: CodeParams,
               options: DecoderOptions | None = None, trial: int = 0) -> DecodeResult:
    """Recursive decoding down to repetition and full-space end nodes."""
    return _decode_single(y, params, ALG_PSI, options, trial)


def decode_phi(y: np.ndarray, params: CodeParams,
               options: DecoderOptions | None = None, trial: int = 0) -> DecodeResult:
    """Recursive decoding that stops at first-order (biorthogonal) nodes."""
    return _decode_single(y, params, ALG_PHI, options, trial)


def decode_op_bound(params: CodeParams, algorithm: str = ALG_PSI,
                    u_rule: str = SCALED) -> int:
    """Closed-form ceiling on the decoder's operation count."""
    n, m, r = params.n, params.m, params.r
    lo = min(r, m - r)
    if algorithm == ALG_PSI:
        return (4 if u_rule == SCALED else 3) * n * lo + n
    if algorithm == ALG_PHI:
        return (3 if u_rule == SCALED else 2) * n * lo + n * (m - r) + n
    raise ValueError(f"unknown algorithm {algorithm!r}")


# --- genie-aided recursion ---------------------------------------------------

class _GenieSink:
    """Collects per-path end values and per-node half-block support sums."""

    __slots__ = ("columns", "paths", "supports", "params")

    def __init__(self, params: CodeParams) -> None:
        self.params = params
        self.columns: list[np.ndarray] = []
        self.paths: list[tuple[int, ...]] = []
        self.supports: dict[tuple[int, ...], np.ndarray] = {}

    def left_end(self, prefix: tuple[int, ...], length_log: int,
                 values: np.ndarray) -> None:
        self.paths.append(prefix + (1,) * length_log)
        self.columns.append(values)

    def right_end(self, prefix: tuple[int, ...], length_log: int,
                  y: np.ndarray) -> None:
        for j in range(1 << length_log):
            suffix = tuple((j >> (length_log - 1 - t)) & 1 for t in range(length_log))
            self.paths.append(prefix + suffix)
            self.columns.append(y[:, j].copy())

    def biorthogonal(self, prefix: tuple[int, ...], values: np.ndarray) -> None:
        self.supports[prefix] = values


def _genie_rec(y: np.ndarray, length_log: int, order: int,
               prefix: tuple[int, ...], sink: _GenieSink) -> None:
    width = 1 << length_log
    if order == 0:
        sink.left_end(prefix, length_log, y.sum(axis=1) / width)
        return
    if order == length_log:
        sink.right_end(prefix, length_log, y)
        return
    if order == 1 and length_log >= 2:
        # Support sum of the codeword flipping the second half: same law
        # as any other balanced support of this first-order node.
        sink.biorthogonal(prefix, y[:, width // 2:].sum(axis=1))
    half = width // 2
    y1, y2 = y[:, :half], y[:, half:]
    _genie_rec(y1 * y2, length_log - 1, order - 1, prefix + (0,), sink)
    _genie_rec((y1 + y2) * 0.5, length_log - 1, order, prefix + (1,), sink)


def genie_batch(y: np.ndarray, params: CodeParams,
                ) -> tuple[list[Path], np.ndarray, dict[tuple[int, ...], np.ndarray]]:
    """Genie-aided recursion over a (B, n) batch, all-ones transmission.

    Every decoded constituent is replaced by its true (all-ones) value, so
    the recursion degenerates to pure dataflow: products on v steps and
    midpoints on u steps.  Returns the paths in decode (lexicographic)
    order, the (B, k) matrix of end values y(path), and the per-node
    half-block support sums keyed by the descent prefix of each
    first-order node.
    """
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.shape[1] != params.n:
        raise ValueError(f"blocks must have length n={params.n}")
    sink = _GenieSink(params)
    _genie_rec(y, params.m, params.r, (), sink)
    paths = [classify_path(params, bits) for bits in sink.paths]
    return paths, np.column_stack(sink.columns), sink.supports


def genie_decode(y: np.ndarray, params: CodeParams,
                 genie: np.ndarray | None = None) -> GenieTrace:
    """Genie-aided end values for a single received block.

    The genie codeword must be the all-ones word (channel symmetry makes
    it the canonical choice); anything else is rejected rather than
    renormalized.
    """
    if genie is not None:
        genie = np.asarray(genie)
        if genie.shape != (params.n,) or not np.all(genie == 1):
            raise ValueError("genie decoding assumes the all-ones codeword")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (params.n,):
        raise ValueError(f"received block must have length n={params.n}")
    paths, values, supports = genie_batch(y[None, :], params)
    return GenieTrace(
        end_values={p: float(values[0, j]) for j, p in enumerate(paths)},
        support_sums={prefix: float(v[0]) for prefix, v in supports.items()},
    )
