import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import codewords_from_basis, min_distance, random_sparse_code
from ldpc_led.bpdec import syndrome_check
from ldpc_led.codes import ParityCheck, sample_gallager
from ldpc_led.led import (ERASED, brute_force_erasure_list, complete, complete_many,
                          led_decode, partial_word, solution_set)

E = ERASED


def random_instance(rng, n_max=24, nu_max=14):
    n = int(rng.integers(4, n_max + 1))
    r = int(rng.integers(1, n))
    h = random_sparse_code(rng, n, r, density=rng.uniform(0.15, 0.5))
    nu = int(rng.integers(0, min(nu_max, n) + 1))
    y = rng.integers(0, 2, n)
    return h, partial_word(y, rng.choice(n, nu, replace=False))


def test_peeling_chain():
    h = ParityCheck.from_array([[1, 1, 0], [0, 1, 1]])
    res = led_decode(h, [0, E, E])
    assert res.consistent and res.n_free == 0
    assert res.base.tolist() == [0, 0, 0]


def test_single_free_variable():
    h = ParityCheck.from_array([[1, 1]])
    res = led_decode(h, [E, E])
    assert res.n_free == 1
    assert solution_set(res) == {(0, 0), (1, 1)}
    assert complete(res, [1]).tolist() == [1, 1]


def test_gallager_24_nu_10_matches_brute_force():
    rng = np.random.default_rng(0)
    h = sample_gallager(3, 6, 24, seed=1)
    cws = codewords_from_basis(h)
    for _ in range(10):
        c = cws[rng.integers(len(cws))]
        y = partial_word(c, rng.choice(24, 10, replace=False))
        assert solution_set(led_decode(h, y)) == brute_force_erasure_list(h, y)


def test_inconsistent_known_bits():
    h = ParityCheck.from_array([[1, 1, 0], [0, 1, 1]])
    res = led_decode(h, [1, 0, E])
    assert not res.consistent
    assert brute_force_erasure_list(h, [1, 0, E]) == set()
    with pytest.raises(ValueError):
        complete(res, [])


def test_all_zero_assignment_gives_base(hamming):
    y = partial_word([0] * 7, [0, 1, 2, 4])
    res = led_decode(hamming, y)
    base = complete(res, [0] * res.n_free)
    expect = np.where(res.base == E, 0, res.base)
    assert np.array_equal(base, expect)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_completion_is_affine(seed):
    rng = np.random.default_rng(seed)
    h = sample_gallager(3, 6, 24, seed=seed % 97)
    y = partial_word(np.zeros(24, int), rng.choice(24, 14, replace=False))
    res = led_decode(h, y)
    L = res.n_free
    z1, z2 = rng.integers(0, 2, (2, L))
    zero = complete(res, np.zeros(L, int))
    assert np.array_equal(complete(res, z1 ^ z2), complete(res, z1) ^ complete(res, z2) ^ zero)
    assert syndrome_check(h, complete(res, z1))


def test_rank_plus_free_equals_erasures():
    rng = np.random.default_rng(3)
    for _ in range(50):
        h, y = random_instance(rng)
        res = led_decode(h, y)
        if res.consistent:
            nu = int((y == E).sum())
            assert res.completion.rank + res.n_free == nu
            assert (res.base == E).sum() == res.n_free


def test_exactness_against_brute_force():
    rng = np.random.default_rng(12)
    for _ in range(300):
        h, y = random_instance(rng)
        assert solution_set(led_decode(h, y)) == brute_force_erasure_list(h, y)


@pytest.mark.parametrize("rule", ["fewest", "first", "random"])
@pytest.mark.parametrize("method", ["interleaved", "peel_then_eliminate"])
def test_solution_set_invariant_to_pivot_rule_and_method(rule, method):
    rng = np.random.default_rng(21)
    for k in range(80):
        h, y = random_instance(rng, n_max=16, nu_max=12)
        a = solution_set(led_decode(h, y))
        b = solution_set(led_decode(h, y, pivot_rule=rule, method=method, seed=k))
        assert a == b


def test_erased_codeword_always_in_list_and_unique_below_dmin(hamming):
    rng = np.random.default_rng(4)
    d = min_distance(hamming)
    cws = codewords_from_basis(hamming)
    for _ in range(200):
        c = cws[rng.integers(len(cws))]
        nu = int(rng.integers(0, 8))
        res = led_decode(hamming, partial_word(c, rng.choice(7, nu, replace=False)))
        assert res.consistent
        aa = list(res.aa_positions)
        assert np.array_equal(complete(res, c[aa]), c)
        if nu < d:
            assert res.n_free == 0


def test_complete_many_matches_complete():
    rng = np.random.default_rng(6)
    h = sample_gallager(3, 6, 48, seed=0)
    res = led_decode(h, partial_word(np.zeros(48, int), rng.choice(48, 24, replace=False)))
    z = rng.integers(0, 2, (10, res.n_free)).astype(np.uint8)
    many = complete_many(res, z)
    for i in range(10):
        assert np.array_equal(many[i], complete(res, z[i]))


def test_brute_force_oracle_edge_cases(hamming):
    c = np.array([1, 1, 1, 0, 0, 0, 0])
    assert syndrome_check(hamming, c)
    assert brute_force_erasure_list(hamming, c) == {tuple(c)}
    assert brute_force_erasure_list(hamming, [1, 0, 0, 0, 0, 0, 0]) == set()
    big = sample_gallager(3, 6, 24, 0)
    with pytest.raises(ValueError):
        brute_force_erasure_list(big, partial_word(np.zeros(24, int), range(21)))


def test_list_size_matches_brute_force_count():
    rng = np.random.default_rng(9)
    for _ in range(100):
        h, y = random_instance(rng)
        res = led_decode(h, y)
        brute = brute_force_erasure_list(h, y)
        assert len(brute) == ((1 << res.n_free) if res.consistent else 0)


def test_original_word_not_modified():
    h = sample_gallager(3, 6, 24, 0)
    y = partial_word(np.zeros(24, int), range(10))
    before = y.copy()
    led_decode(h, y)
    assert np.array_equal(y, before)


def test_length_mismatch(hamming):
    with pytest.raises(ValueError):
        led_decode(hamming, [0, 0])
