import itertools

import numpy as np
import pytest

from ldpc_led.codes import ParityCheck

# (criterion number, passed, detail) rows collected by the acceptance suite
ACCEPTANCE_RESULTS = []


@pytest.fixture
def record_criterion():
    def _record(num, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {num}: {detail}"
        print(line)
        ACCEPTANCE_RESULTS.append((num, passed, line))
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)


HAMMING_7_4 = np.array([
    [1, 0, 1, 0, 1, 0, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
], dtype=np.uint8)


@pytest.fixture
def hamming():
    return ParityCheck.from_array(HAMMING_7_4)


def all_codewords(h: ParityCheck) -> np.ndarray:
    """Every codeword, by exhaustive search over 2^n words (small n only)."""
    n = h.n
    words = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int64)
    ok = ~((words @ h.to_array().astype(np.int64).T) & 1).any(axis=1)
    return words[ok].astype(np.uint8)


def codewords_from_basis(h: ParityCheck) -> np.ndarray:
    """Every codeword as the span of a nullspace basis."""
    from ldpc_led.gf2core import nullspace, unpack_bits
    basis = np.array([unpack_bits(v, h.n) for v in nullspace(h.to_bitmatrix())], dtype=np.int64)
    k = len(basis)
    if k == 0:
        return np.zeros((1, h.n), dtype=np.uint8)
    coef = ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1).astype(np.int64)
    return ((coef @ basis) & 1).astype(np.uint8)


def min_distance(h: ParityCheck) -> int:
    w = codewords_from_basis(h).sum(axis=1)
    return int(w[w > 0].min()) if (w > 0).any() else h.n + 1


def random_sparse_code(rng, n, r, density=0.3) -> ParityCheck:
    a = (rng.random((r, n)) < density).astype(np.uint8)
    return ParityCheck.from_array(a)
