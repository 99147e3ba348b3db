"""List erasure decoding on the binary erasure channel.

A received word uses ``ERASED`` (-1) for erased symbols.  Decoding alternates
peeling (a check with one erased position fixes it) with Gauss-Jordan pivot
steps, and returns every codeword consistent with the known symbols as an
affine map from ``L`` arbitrarily assigned positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .codes import ParityCheck
from .gf2core import BitMatrix, EliminationResult, diagonalize

ERASED = -1
MAX_ORACLE_ERASURES = 20


def partial_word(bits: Sequence[int], erased: Sequence[int] = ()) -> np.ndarray:
    """Copy of ``bits`` as an int8 vector with ``erased`` positions marked."""
    y = np.asarray(bits, dtype=np.int8).copy()
    if len(erased):
        y[np.asarray(list(erased), dtype=np.int64)] = ERASED
    return y


def erased_positions(y) -> np.ndarray:
    return np.flatnonzero(np.asarray(y) == ERASED)


@dataclass(frozen=True)
class LedResult:
    base: np.ndarray
    aa_positions: tuple[int, ...]
    completion: EliminationResult
    consistent: bool

    @property
    def n_free(self) -> int:
        return len(self.aa_positions)

    @cached_property
    def _affine(self) -> tuple[np.ndarray, np.ndarray]:
        """(word with AA = 0, L x n matrix of per-AA-bit effects)."""
        n = len(self.base)
        base0 = np.where(self.base == ERASED, 0, self.base).astype(np.uint8)
        L = self.n_free
        gen = np.zeros((L, n), dtype=np.uint8)
        for l, p in enumerate(self.aa_positions):
            gen[l, p] = 1
        cm = self.completion.completion_matrix
        for dep, row in zip(self.completion.dependent_columns, cm.rows):
            while row:
                low = row & -row
                gen[low.bit_length() - 1, dep] = 1
                row ^= low
        return base0, gen


def _fail(y: np.ndarray) -> LedResult:
    empty = EliminationResult(0, (), (), BitMatrix(0, 0), (), False)
    return LedResult(base=y, aa_positions=(), completion=empty, consistent=False)


class _Workspace:
    """Erased-position masks and syndrome bits of every check, updated in place."""

    def __init__(self, h: ParityCheck, y: np.ndarray):
        self.mask: list[int] = []
        self.synd: list[int] = []
        self.rows_of: dict[int, set[int]] = {}
        self.singles: set[int] = set()
        self.bad = False
        for i, row in enumerate(h.rows):
            m, s = 0, 0
            for c in row:
                v = int(y[c])
                if v == ERASED:
                    m |= 1 << c
                    self.rows_of.setdefault(c, set()).add(i)
                else:
                    s ^= v & 1
            self.mask.append(m)
            self.synd.append(s)
            self._classify(i)

    def _classify(self, i: int) -> None:
        m = self.mask[i]
        if m == 0:
            self.singles.discard(i)
            if self.synd[i]:
                self.bad = True
        elif m & (m - 1) == 0:
            self.singles.add(i)
        else:
            self.singles.discard(i)

    def weight(self, i: int) -> int:
        return self.mask[i].bit_count()

    def assign(self, p: int, value: int) -> None:
        bit = 1 << p
        for i in self.rows_of.pop(p, ()):
            self.mask[i] &= ~bit
            self.synd[i] ^= value
            self._classify(i)

    def add_row(self, dst: int, src: int) -> None:
        diff = self.mask[src]
        self.mask[dst] ^= diff
        self.synd[dst] ^= self.synd[src]
        while diff:
            low = diff & -diff
            p = low.bit_length() - 1
            s = self.rows_of[p]
            if self.mask[dst] & low:
                s.add(dst)
            else:
                s.discard(dst)
            diff ^= low
        self._classify(dst)

    def peel(self, values: np.ndarray, erased: set[int]) -> None:
        while self.singles and not self.bad:
            j = min(self.singles)
            m = self.mask[j]
            p = m.bit_length() - 1
            v = self.synd[j]
            values[p] = v
            erased.discard(p)
            self.assign(p, v)


def led_decode(h: ParityCheck, y, pivot_rule: str = "fewest",
               method: str = "interleaved", seed: int | None = None) -> LedResult:
    """Decode a partially erased word.

    ``pivot_rule`` picks the pivot check when peeling stalls: ``"fewest"``
    (fewest erased positions, then lowest index), ``"first"`` (lowest index)
    or ``"random"`` (seeded).  The leader is the lowest-index erased position
    of the pivot, except under ``"random"``.  ``method="peel_then_eliminate"``
    peels to a fixpoint and hands the rest to :func:`diagonalize`.
    """
    y = np.asarray(y, dtype=np.int8)
    if y.shape != (h.n,):
        raise ValueError(f"received word must have length {h.n}")
    if pivot_rule not in ("fewest", "first", "random"):
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    values = y.copy()
    erased = set(int(p) for p in erased_positions(y))
    nu = len(erased)
    ws = _Workspace(h, values)
    if ws.bad:
        return _fail(values)

    if method == "peel_then_eliminate":
        ws.peel(values, erased)
        if ws.bad:
            return _fail(values)
        return _finish_with_diagonalize(ws, y, values, erased)
    if method != "interleaved":
        raise ValueError(f"unknown method {method!r}")

    rng = np.random.default_rng(seed) if pivot_rule == "random" else None
    leader_of: dict[int, int] = {}
    while True:
        ws.peel(values, erased)
        if ws.bad:
            return _fail(values)
        if not erased:
            break
        cand = [i for i in range(len(ws.mask)) if i not in leader_of and ws.mask[i]]
        if not cand:
            break
        if pivot_rule == "fewest":
            j = min(cand, key=lambda i: (ws.weight(i), i))
        elif pivot_rule == "first":
            j = cand[0]
        else:
            j = cand[int(rng.integers(len(cand)))]
        m = ws.mask[j]
        if rng is None:
            lead = (m & -m).bit_length() - 1
        else:
            bits = [b for b in range(m.bit_length()) if (m >> b) & 1]
            lead = bits[int(rng.integers(len(bits)))]
        leader_of[j] = lead
        for i in list(ws.rows_of[lead]):
            if i != j:
                ws.add_row(i, j)
        if ws.bad:
            return _fail(values)

    # pivot rows whose leader is still erased define the dependent positions
    leaders = {p: j for j, p in leader_of.items() if p in erased}
    aa = sorted(p for p in erased if p not in leaders)
    aa_index = {p: k for k, p in enumerate(aa)}
    resolved = sorted(set(int(p) for p in erased_positions(y)) - set(aa))
    mat_rows, offset = [], []
    residual = 0
    for p in resolved:
        if p in leaders:
            j = leaders[p]
            rest = ws.mask[j] & ~(1 << p)
            v = 0
            while rest:
                low = rest & -rest
                v |= 1 << aa_index[low.bit_length() - 1]
                rest ^= low
            residual += v != 0
            mat_rows.append(v)
            offset.append(ws.synd[j])
        else:
            mat_rows.append(0)
            offset.append(int(values[p]))
    elim = EliminationResult(
        rank=nu - len(aa), aa_columns=tuple(aa), dependent_columns=tuple(resolved),
        completion_matrix=BitMatrix(len(resolved), len(aa), mat_rows),
        completion_offset=tuple(offset), consistent=True, residual_rank=residual)
    return _result(values, elim)


def _finish_with_diagonalize(ws: _Workspace, y: np.ndarray, values: np.ndarray,
                             erased: set[int]) -> LedResult:
    cols = sorted(erased)
    live = [i for i in range(len(ws.mask)) if ws.mask[i]]
    sub = []
    for i in live:
        m, v = ws.mask[i], 0
        for k, p in enumerate(cols):
            if (m >> p) & 1:
                v |= 1 << k
        sub.append(v)
    red = diagonalize(BitMatrix(len(live), len(cols), sub), [ws.synd[i] for i in live],
                      labels=cols)
    orig = [int(p) for p in erased_positions(y)]
    if not red.consistent:
        return _fail(values)
    fixed = [p for p in orig if p not in erased]
    dep = list(red.dependent_columns) + fixed
    mat = list(red.completion_matrix.rows) + [0] * len(fixed)
    off = list(red.completion_offset) + [int(values[p]) for p in fixed]
    order = sorted(range(len(dep)), key=lambda k: dep[k])
    elim = EliminationResult(
        rank=len(orig) - red.n_free, aa_columns=red.aa_columns,
        dependent_columns=tuple(dep[k] for k in order),
        completion_matrix=BitMatrix(len(dep), red.n_free, [mat[k] for k in order]),
        completion_offset=tuple(off[k] for k in order), consistent=True,
        residual_rank=red.residual_rank)
    return _result(values, elim)


def _result(values: np.ndarray, elim: EliminationResult) -> LedResult:
    base = values.copy()
    for p, off in zip(elim.dependent_columns, elim.completion_offset):
        base[p] = off
    base[list(elim.aa_columns)] = ERASED
    return LedResult(base=base, aa_positions=elim.aa_columns, completion=elim,
                     consistent=True)


def complete(res: LedResult, aa_values: Sequence[int]) -> np.ndarray:
    """Codeword obtained by giving the AA positions ``aa_values``."""
    return complete_many(res, np.asarray(aa_values, dtype=np.uint8)[None, :])[0]


def complete_many(res: LedResult, aa_values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`complete`; ``aa_values`` has shape ``(T, L)``."""
    if not res.consistent:
        raise ValueError("cannot complete an inconsistent LED result")
    z = np.asarray(aa_values, dtype=np.uint8)
    if z.ndim != 2 or z.shape[1] != res.n_free:
        raise ValueError(f"need assignments of length {res.n_free}")
    base0, gen = res._affine
    if res.n_free == 0:
        return np.repeat(base0[None, :], z.shape[0], axis=0)
    flips = (z.astype(np.int64) @ gen.astype(np.int64)) & 1
    return (base0[None, :] ^ flips.astype(np.uint8))


def solution_set(res: LedResult) -> set[tuple[int, ...]]:
    """Every codeword in the LED list (for tests and small L only)."""
    if not res.consistent:
        return set()
    L = res.n_free
    if L > MAX_ORACLE_ERASURES:
        raise ValueError("list too large to enumerate")
    z = ((np.arange(1 << L)[:, None] >> np.arange(L)) & 1).astype(np.uint8)
    return {tuple(int(b) for b in w) for w in complete_many(res, z)}


def brute_force_erasure_list(h: ParityCheck, y) -> set[tuple[int, ...]]:
    """All codewords agreeing with ``y`` off the erasures, by enumeration."""
    y = np.asarray(y, dtype=np.int8)
    pos = erased_positions(y)
    nu = len(pos)
    if nu > MAX_ORACLE_ERASURES:
        raise ValueError(f"{nu} erasures exceed the oracle limit of {MAX_ORACLE_ERASURES}")
    z = ((np.arange(1 << nu)[:, None] >> np.arange(nu)) & 1).astype(np.uint8)
    words = np.repeat(np.where(y == ERASED, 0, y).astype(np.uint8)[None, :], len(z), axis=0)
    words[:, pos] = z
    H = h.to_array().astype(np.int64)
    ok = ~((words.astype(np.int64) @ H.T) & 1).any(axis=1)
    return {tuple(int(b) for b in w) for w in words[ok]}
