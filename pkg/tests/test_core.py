import numpy as np
import pytest

from rmrec import (
    LEFT_END,
    RIGHT_END,
    CodeParams,
    classify_path,
    codeword_to_info,
    dimension,
    encode,
    encode_batch,
    encode_op_count,
    enumerate_paths,
)
from rmrec.core import symbols_to_bits

from oracles import encode_oracle, generator_rows, pack_rows, packed_codebook, popcount


@pytest.mark.parametrize("m,r,n,k,d", [
    (7, 2, 128, 29, 32),
    (8, 3, 256, 93, 32),
    (8, 2, 256, 37, 64),
    (5, 0, 32, 1, 32),
    (1, 1, 2, 2, 1),
])
def test_code_params(m, r, n, k, d):
    params = CodeParams(m, r)
    assert (params.n, params.k, params.d) == (n, k, d)


def test_params_reject_bad_orders():
    with pytest.raises(ValueError):
        CodeParams(3, -1)
    with pytest.raises(ValueError):
        CodeParams(2, 3)
    with pytest.raises(ValueError):
        CodeParams(0, 0)


@pytest.mark.parametrize("m,r", [(4, 2), (6, 3), (9, 1), (10, 10)])
def test_dimension_counts_heavy_strings(m, r):
    heavy = sum(1 for v in range(1 << m) if bin(v).count("1") >= m - r)
    assert dimension(m, r) == heavy


def test_enumerate_paths_3_1():
    paths = enumerate_paths(CodeParams(3, 1))
    assert [str(p) for p in paths] == ["011", "101", "110", "111"]
    assert [(p.kind, p.end_size) for p in paths] == [
        (LEFT_END, 2), (LEFT_END, 1), (RIGHT_END, 1), (RIGHT_END, 1)]


def test_enumerate_paths_repetition_code():
    (only,) = enumerate_paths(CodeParams(6, 0))
    assert only.bits == (1,) * 6
    assert only.kind == LEFT_END and only.end_size == 6


@pytest.mark.parametrize("m", range(2, 9))
def test_path_count_and_order(m):
    for r in range(m + 1):
        params = CodeParams(m, r)
        paths = enumerate_paths(params)
        assert len(paths) == params.k
        bits = [p.bits for p in paths]
        assert bits == sorted(bits)
        assert all(p.weight >= m - r for p in paths)


def test_classify_path_rejects_invalid():
    params = CodeParams(3, 1)
    with pytest.raises(ValueError):
        classify_path(params, (0, 1, 0))  # weight too low
    with pytest.raises(ValueError):
        classify_path(params, (0, 1))  # wrong length
    with pytest.raises(ValueError):
        classify_path(params, (0, 2, 1))


def test_path_accessors():
    params = CodeParams(5, 2)
    left = classify_path(params, (0, 1, 0, 1, 1))
    assert left.kind == LEFT_END and left.end_size == 2
    assert left.descent == (0, 1, 0) and left.suffix == (1, 1)
    right = classify_path(params, (1, 1, 1, 0, 1))
    assert right.kind == RIGHT_END and right.end_size == 2
    assert right.suffix == (0, 1) and right.suffix_index == 1


def test_encode_zero_and_monomial():
    params = CodeParams(3, 1)
    assert np.all(encode(np.zeros(4, dtype=np.uint8), params) == 1)
    got = encode(np.array([1, 0, 0, 0], dtype=np.uint8), params)
    assert np.array_equal(got, [1, 1, 1, 1, -1, -1, -1, -1])


def test_encode_validation():
    params = CodeParams(3, 1)
    with pytest.raises(ValueError):
        encode(np.zeros(5, dtype=np.uint8), params)
    with pytest.raises(ValueError):
        encode(np.array([0, 2, 0, 0]), params)


def test_encode_linearity():
    rng = np.random.default_rng(1)
    for m, r in [(4, 2), (6, 3), (7, 5)]:
        params = CodeParams(m, r)
        a = rng.integers(0, 2, params.k).astype(np.uint8)
        b = rng.integers(0, 2, params.k).astype(np.uint8)
        assert np.array_equal(encode(a ^ b, params),
                              encode(a, params) * encode(b, params))


@pytest.mark.parametrize("m", range(1, 6))
def test_encoder_matches_generator_oracle(m):
    # Basis vectors pin every generator row; random blocks exercise sums.
    rng = np.random.default_rng(m)
    for r in range(m + 1):
        params = CodeParams(m, r)
        basis = np.eye(params.k, dtype=np.uint8)
        assert np.array_equal(encode_batch(basis, params).astype(np.int8),
                              encode_oracle(basis, params))
        block = rng.integers(0, 2, (64, params.k)).astype(np.uint8)
        assert np.array_equal(encode_batch(block, params).astype(np.int8),
                              encode_oracle(block, params))


def test_info_roundtrip():
    rng = np.random.default_rng(2)
    for m, r in [(3, 1), (5, 2), (8, 3), (6, 6), (7, 1)]:
        params = CodeParams(m, r)
        info = rng.integers(0, 2, params.k).astype(np.uint8)
        assert np.array_equal(codeword_to_info(encode(info, params), params), info)


def test_exhaustive_distance_small():
    for m in range(1, 5):
        for r in range(m + 1):
            params = CodeParams(m, r)
            book = packed_codebook(params)
            weights = popcount(book)
            assert int(weights[1:].min()) == params.d
            assert len(book) == 1 << params.k


def test_plotkin_split_small():
    for m in range(2, 5):
        for r in range(1, m + 1):
            params = CodeParams(m, r)
            half = params.n // 2
            # at r = m the u constituent already spans the full half-space
            u_book = set(packed_codebook(CodeParams(m - 1, min(r, m - 1))).tolist())
            v_book = set(packed_codebook(CodeParams(m - 1, r - 1)).tolist())
            for word in packed_codebook(params):
                first = int(word) >> half
                second = int(word) & ((1 << half) - 1)
                assert first in u_book
                assert (first ^ second) in v_book


def test_codeword_group_structure():
    params = CodeParams(4, 2)
    book = packed_codebook(params)
    rng = np.random.default_rng(3)
    members = set(book.tolist())
    picks = rng.integers(0, len(book), (200, 2))
    for i, j in picks:
        assert int(book[i] ^ book[j]) in members  # product closure in +/-1 domain


def test_encode_op_count_bound_and_structure():
    def internal_halves(s, order):
        if order == 0 or order == s:
            return 0
        return (internal_halves(s - 1, order - 1) + internal_halves(s - 1, order)
                + (1 << (s - 1)))

    for m in range(1, 13):
        for r in range(m + 1):
            params = CodeParams(m, r)
            ops = encode_op_count(params)
            assert ops == internal_halves(m, r)
            assert ops <= params.n * min(r, m - r)


def test_symbols_to_bits_validation():
    assert np.array_equal(symbols_to_bits(np.array([1, -1, 1])), [0, 1, 0])
    with pytest.raises(ValueError):
        symbols_to_bits(np.array([1, 0]))


def test_generator_rows_are_independent():
    # sanity on the oracle itself: k distinct rows spanning 2^k words
    params = CodeParams(4, 2)
    rows = pack_rows(generator_rows(params))
    assert len(set(rows.tolist())) == params.k
    assert len(set(packed_codebook(params).tolist())) == 1 << params.k
