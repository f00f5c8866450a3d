"""Code parameters, information paths, and the recursive Plotkin encoder.

A codeword of the length-2^m, order-r binary Reed-Muller code is built by
repeatedly combining two shorter codewords u and v as (u, u+v).  In the
+/-1 symbol domain used throughout this package (binary a maps to (-1)^a)
the combination reads (u, u*v) componentwise.  Recursing on u and v leads
to end nodes that are either repetition codes {g,0} (one information bit)
or full spaces {h,h} (2^h information bits).

Each information bit is keyed by an m-bit descent path through that tree:
bit 0 steps to the v constituent (order drops by one), bit 1 steps to the
u constituent.  Paths ending at a repetition node carry a forced all-ones
suffix; paths ending at a full space carry a free suffix that selects one
of the node's 2^h bits.  The complete path set is exactly the m-bit
strings of Hamming weight >= m-r, ordered as binary numbers with the
first bit most significant.  Codeword positions are indexed the same way:
position p has coordinates x_1..x_m with x_1 the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

LEFT_END = "left"  # repetition end node {g, 0}
RIGHT_END = "right"  # full-space end node {h, h}

__all__ = [
    "LEFT_END",
    "RIGHT_END",
    "CodeParams",
    "Path",
    "classify_path",
    "dimension",
    "enumerate_paths",
    "encode",
    "encode_batch",
    "encode_op_count",
    "codeword_to_info",
    "extract_info_batch",
    "bits_to_symbols",
    "symbols_to_bits",
]


@dataclass(frozen=True)
class CodeParams:
    """Parameters (m, r) of a Reed-Muller code; n, k, d follow from them."""

    m: int
    r: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0 <= self.r <= self.m:
            raise ValueError(f"r must lie in [0, {self.m}], got {self.r}")

    @property
    def n(self) -> int:
        """Code length 2^m."""
        return 1 << self.m

    @property
    def k(self) -> int:
        """Code dimension, the number of weight >= m-r binary m-strings."""
        return dimension(self.m, self.r)

    @property
    def d(self) -> int:
        """Minimum distance 2^(m-r)."""
        return 1 << (self.m - self.r)

    def __str__(self) -> str:
        return f"RM(m={self.m}, r={self.r})"


def dimension(m: int, r: int) -> int:
    """Dimension of the {m, r} code: sum of C(m, i) for i = 0..r."""
    return sum(comb(m, i) for i in range(r + 1))


@dataclass(frozen=True, order=True)
class Path:
    """One m-bit descent through the Plotkin tree, keying one information bit.

    Paths sort lexicographically on their bits (first bit most
    significant), which is both the information-bit order and the order in
    which the recursive decoders finalize decisions.
    """

    bits: tuple[int, ...]
    kind: str = field(compare=False)
    end_size: int = field(compare=False)  # g of the {g,0} end, or h of the {h,h} end

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @property
    def descent(self) -> tuple[int, ...]:
        """The prefix of genuine tree steps, up to (excluding) the end node."""
        return self.bits[: len(self.bits) - self.end_size]

    @property
    def suffix(self) -> tuple[int, ...]:
        """Trailing bits at the end node: forced ones (left) or free (right)."""
        return self.bits[len(self.bits) - self.end_size :]

    @property
    def suffix_index(self) -> int:
        """Free suffix read as an integer; selects the bit within a {h,h} node."""
        idx = 0
        for b in self.suffix:
            idx = (idx << 1) | b
        return idx

    def node_label(self) -> str:
        return f"{{{self.end_size},0}}" if self.kind == LEFT_END else f"{{{self.end_size},{self.end_size}}}"

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def classify_path(params: CodeParams, bits: tuple[int, ...]) -> Path:
    """Classify an m-bit string by simulating its descent through the tree.

    A 0 step lowers both the remaining length and the order, a 1 step only
    the length.  The descent stops at order zero (repetition node, the
    remaining bits must all equal one) or when the order meets the
    remaining length (full space, remaining bits free).
    """
    m, r = params.m, params.r
    if len(bits) != m or any(b not in (0, 1) for b in bits):
        raise ValueError(f"path must be a {m}-tuple of bits, got {bits!r}")
    remaining, order = m, r
    for i, b in enumerate(bits):
        if order == 0:
            if any(x != 1 for x in bits[i:]):
                raise ValueError(f"path {bits!r} is invalid for {params}: "
                                 "bits after a repetition node must be ones")
            return Path(tuple(bits), LEFT_END, remaining)
        if order == remaining:
            return Path(tuple(bits), RIGHT_END, remaining)
        remaining -= 1
        if b == 0:
            order -= 1
    # Unreachable: 0 <= order <= remaining forces an end node within m steps.
    raise ValueError(f"path {bits!r} does not reach an end node of {params}")


def enumerate_paths(params: CodeParams) -> list[Path]:
    """All k information paths of the code, lexicographically sorted."""
    m, r = params.m, params.r
    paths = []
    for zeros in range(r + 1):
        for zpos in combinations(range(m), zeros):
            bits = [1] * m
            for i in zpos:
                bits[i] = 0
            paths.append(classify_path(params, tuple(bits)))
    paths.sort()
    return paths


def bits_to_symbols(bits: np.ndarray) -> np.ndarray:
    """Map binary {0,1} to the multiplicative domain: a -> (-1)^a."""
    return 1 - 2 * np.asarray(bits, dtype=np.int8)


def symbols_to_bits(symbols: np.ndarray) -> np.ndarray:
    """Inverse of :func:`bits_to_symbols`; +1 -> 0, -1 -> 1."""
    sym = np.asarray(symbols)
    if not np.all(np.abs(sym) == 1):
        raise ValueError("symbols must be +1 or -1")
    return (sym < 0).astype(np.uint8)


def _encode_rec(bits: np.ndarray, length_log: int, order: int) -> np.ndarray:
    # bits: (B, k_node) in {0,1}; returns (B, 2^length_log) in {+1.0, -1.0}
    width = 1 << length_log
    if order == 0:
        sym = 1.0 - 2.0 * bits[:, :1].astype(np.float64)
        return np.repeat(sym, width, axis=1)
    if order == length_log:
        return 1.0 - 2.0 * bits.astype(np.float64)
    kv = dimension(length_log - 1, order - 1)
    v = _encode_rec(bits[:, :kv], length_log - 1, order - 1)
    u = _encode_rec(bits[:, kv:], length_log - 1, order)
    return np.concatenate([u, u * v], axis=1)


def encode_batch(info: np.ndarray, params: CodeParams) -> np.ndarray:
    """Encode a (B, k) block of information bits into (B, n) +/-1 symbols."""
    info = np.atleast_2d(np.asarray(info))
    if info.shape[1] != params.k:
        raise ValueError(f"info block must have k={params.k} bits per row, "
                         f"got {info.shape[1]}")
    if info.size and not np.all((info == 0) | (info == 1)):
        raise ValueError("info bits must be 0 or 1")
    return _encode_rec(info, params.m, params.r)


def encode(info: np.ndarray, params: CodeParams) -> np.ndarray:
    """Encode k information bits (lexicographic path order) into n +/-1 symbols."""
    info = np.asarray(info)
    if info.ndim != 1:
        raise ValueError("encode expects a 1-D info block; see encode_batch")
    return encode_batch(info[None, :], params)[0].astype(np.int8)


def encode_op_count(params: CodeParams) -> int:
    """Symbol multiplications performed by the encoder: one length-n/2
    product u*v per internal node.  End nodes need no arithmetic."""

    def count(length_log: int, order: int) -> int:
        if order == 0 or order == length_log:
            return 0
        half = 1 << (length_log - 1)
        return count(length_log - 1, order - 1) + count(length_log - 1, order) + half

    return count(params.m, params.r)


def _extract_rec(cw: np.ndarray, length_log: int, order: int) -> np.ndarray:
    if order == 0:
        return (cw[:, :1] < 0).astype(np.uint8)
    if order == length_log:
        return (cw < 0).astype(np.uint8)
    half = 1 << (length_log - 1)
    first, second = cw[:, :half], cw[:, half:]
    info_v = _extract_rec(first * second, length_log - 1, order - 1)
    info_u = _extract_rec(first, length_log - 1, order)
    return np.concatenate([info_v, info_u], axis=1)


def extract_info_batch(codewords: np.ndarray, length_log: int, order: int) -> np.ndarray:
    """Recover info bits from clean (noiseless) +/-1 codewords, batched.

    Exact inverse of the encoder: the v constituent is re-derived as the
    componentwise product of the two halves, so the input must be a valid
    codeword with symbols exactly +/-1.
    """
    return _extract_rec(np.atleast_2d(np.asarray(codewords, dtype=np.float64)),
                        length_log, order)


def codeword_to_info(codeword: np.ndarray, params: CodeParams) -> np.ndarray:
    """Recover the k info bits of a clean +/-1 codeword of the code."""
    codeword = np.asarray(codeword)
    if codeword.shape != (params.n,):
        raise ValueError(f"codeword must have length n={params.n}")
    if not np.all(np.abs(codeword) == 1):
        raise ValueError("codeword symbols must be +1 or -1")
    return extract_info_batch(codeword[None, :], params.m, params.r)[0]
