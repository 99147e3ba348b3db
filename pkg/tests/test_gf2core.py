import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpc_led.gf2core import (BitMatrix, diagonalize, log_binomial, nullspace, pack_bits,
                              rank, unpack_bits)


def span_rank(a: np.ndarray) -> int:
    """Rank as log2 of the number of distinct row combinations."""
    r = a.shape[0]
    seen = set()
    for coef in itertools.product((0, 1), repeat=r):
        v = (np.array(coef, dtype=np.int64) @ a.astype(np.int64)) & 1
        seen.add(v.tobytes())
    return int(round(math.log2(len(seen))))


def brute_solutions(a: np.ndarray, s) -> set:
    ncols = a.shape[1]
    out = set()
    for z in itertools.product((0, 1), repeat=ncols):
        if np.array_equal((a.astype(np.int64) @ np.array(z)) & 1, np.asarray(s) & 1):
            out.add(z)
    return out


def completed_solutions(res, ncols: int) -> set:
    out = set()
    for aa in itertools.product((0, 1), repeat=res.n_free):
        sol = res.solve(aa)
        out.add(tuple(sol[c] for c in range(ncols)))
    return out


matrices = st.integers(1, 6).flatmap(lambda r: st.integers(1, 8).flatmap(
    lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c),
                       min_size=r, max_size=r)))


def test_bitmatrix_roundtrip_and_access():
    a = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
    m = BitMatrix.from_array(a)
    assert np.array_equal(m.to_array(), a)
    assert m.get(0, 2) == 1 and m.get(1, 0) == 0
    m.set(1, 0, 1)
    assert m.get(1, 0) == 1
    with pytest.raises(IndexError):
        m.get(2, 0)


def test_row_operations_keep_shape():
    m = BitMatrix.from_array([[1, 0, 1], [0, 1, 1]])
    m.xor_row(0, 1)
    assert m.to_array().tolist() == [[1, 1, 0], [0, 1, 1]]
    m.swap_rows(0, 1)
    assert (m.nrows, m.ncols) == (2, 3)
    assert m.to_array().tolist() == [[0, 1, 1], [1, 1, 0]]


def test_pack_unpack():
    assert pack_bits([1, 0, 1, 1]) == 0b1101
    assert unpack_bits(0b1101, 5) == [1, 0, 1, 1, 0]


def test_rank_trivial_cases():
    assert rank(BitMatrix.identity(3)) == 3
    assert rank(BitMatrix.zeros(4, 6)) == 0


def test_rank_random_matches_span_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.integers(0, 2, (5, 8))
        assert rank(BitMatrix.from_array(a)) == span_rank(a)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rank_equals_transpose_rank(rows):
    m = BitMatrix.from_array(np.array(rows))
    assert rank(m) == rank(m.transpose())
    assert rank(m) <= min(m.nrows, m.ncols)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_nullspace_dimension_and_membership(rows):
    m = BitMatrix.from_array(np.array(rows))
    basis = nullspace(m)
    assert len(basis) == m.ncols - rank(m)
    for v in basis:
        assert not any(m.mul_vec(unpack_bits(v, m.ncols)))


def test_diagonalize_contradictory_checks():
    res = diagonalize(BitMatrix.from_array([[1, 1], [1, 1]]), [0, 1])
    assert not res.consistent


def test_diagonalize_empty_system():
    res = diagonalize(BitMatrix(0, 0), [])
    assert res.consistent and res.rank == 0 and res.n_free == 0


def test_diagonalize_random_6x10_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = rng.integers(0, 2, (6, 10))
        s = rng.integers(0, 2, 6)
        res = diagonalize(BitMatrix.from_array(a), s)
        brute = brute_solutions(a, s)
        assert res.consistent == bool(brute)
        if res.consistent:
            assert res.rank + res.n_free == 10
            assert completed_solutions(res, 10) == brute


def test_diagonalize_self_consistent_1000_systems():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        r, c = rng.integers(1, 13, 2)
        a = (rng.random((r, c)) < rng.uniform(0.1, 0.7)).astype(np.uint8)
        s = rng.integers(0, 2, r)
        res = diagonalize(BitMatrix.from_array(a), s)
        brute = brute_solutions(a, s)
        assert res.consistent == bool(brute)
        if res.consistent:
            assert completed_solutions(res, c) == brute


def test_diagonalize_unique_solution_satisfies_checks():
    a = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 0]])
    s = [1, 0, 1]
    res = diagonalize(BitMatrix.from_array(a), s)
    assert res.consistent and res.n_free == 0
    sol = res.solve([])
    z = np.array([sol[c] for c in range(3)])
    assert np.array_equal((a @ z) & 1, s)


def test_diagonalize_labels_rename_columns():
    res = diagonalize(BitMatrix.from_array([[1, 1]]), [1], labels=[7, 9])
    assert res.dependent_columns == (7,) and res.aa_columns == (9,)
    assert res.solve([0]) == {9: 0, 7: 1}


def test_log_binomial_small_values():
    assert log_binomial(5, 0) == 0.0
    assert log_binomial(8, 4) == pytest.approx(math.log(70), rel=1e-12)


def test_log_binomial_large_matches_big_integer():
    exact = math.log(math.comb(576, 288))
    assert abs(log_binomial(576, 288) - exact) <= 1e-10 * exact


def test_log_binomial_rejects_k_above_n():
    with pytest.raises(ValueError):
        log_binomial(3, 4)
