"""Bit-packed GF(2) matrices, rank and Gauss-Jordan diagonalization.

Rows are stored as Python integers used as bitsets (bit ``j`` of a row is
column ``j``).  This keeps row XOR a single machine-level operation for the
matrix sizes seen in short LDPC codes and has no width limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class BitMatrix:
    """Dense GF(2) matrix with packed rows."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int] | None = None):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        if rows is None:
            self.rows = [0] * self.nrows
        else:
            if len(rows) != self.nrows:
                raise ValueError("row count mismatch")
            limit = 1 << self.ncols
            for r in rows:
                if r < 0 or r >= limit:
                    raise ValueError("row has bits beyond ncols")
            self.rows = list(rows)

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        nrows, ncols = a.shape
        rows = []
        for row in a:
            v = 0
            for j in np.flatnonzero(row):
                v |= 1 << int(j)
            rows.append(v)
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    out[i, j] = 1
                r >>= 1
                j += 1
        return out

    def get(self, i: int, j: int) -> int:
        self._check(i, j)
        return (self.rows[i] >> j) & 1

    def set(self, i: int, j: int, value: int) -> None:
        self._check(i, j)
        if value & 1:
            self.rows[i] |= 1 << j
        else:
            self.rows[i] &= ~(1 << j)

    def _check(self, i: int, j: int) -> None:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"({i}, {j}) outside {self.nrows}x{self.ncols}")

    def xor_row(self, dst: int, src: int) -> None:
        self.rows[dst] ^= self.rows[src]

    def swap_rows(self, a: int, b: int) -> None:
        self.rows[a], self.rows[b] = self.rows[b], self.rows[a]

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.nrows, self.ncols, self.rows)

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return BitMatrix(self.ncols, self.nrows, cols)

    def columns(self, index: Sequence[int]) -> "BitMatrix":
        """Submatrix formed by the listed columns, in the given order."""
        index = list(index)
        for j in index:
            if not 0 <= j < self.ncols:
                raise IndexError(j)
        rows = []
        for r in self.rows:
            v = 0
            for k, j in enumerate(index):
                if (r >> j) & 1:
                    v |= 1 << k
            rows.append(v)
        return BitMatrix(self.nrows, len(index), rows)

    def mul_vec(self, x: Sequence[int]) -> list[int]:
        """Matrix-vector product over GF(2)."""
        if len(x) != self.ncols:
            raise ValueError("length mismatch")
        xv = pack_bits(x)
        return [(r & xv).bit_count() & 1 for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


def pack_bits(bits: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if int(b) & 1:
            v |= 1 << j
    return v


def unpack_bits(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


def rank(m: BitMatrix) -> int:
    """GF(2) rank by elimination on the packed rows."""
    # basis keyed by leading (highest) bit
    basis: dict[int, int] = {}
    for r in m.rows:
        while r:
            top = r.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = r
                break
            r ^= b
    return len(basis)


def nullspace(m: BitMatrix) -> list[int]:
    """Basis of {x : m x = 0}, each vector packed as an int over ``m.ncols`` bits."""
    rows = list(m.rows)
    pivots: list[tuple[int, int]] = []  # (column, row index)
    used = 0
    for col in range(m.ncols):
        bit = 1 << col
        piv = None
        for i in range(used, len(rows)):
            if rows[i] & bit:
                piv = i
                break
        if piv is None:
            continue
        rows[used], rows[piv] = rows[piv], rows[used]
        for i in range(len(rows)):
            if i != used and rows[i] & bit:
                rows[i] ^= rows[used]
        pivots.append((col, used))
        used += 1
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for free in range(m.ncols):
        if free in pivot_cols:
            continue
        v = 1 << free
        for c, i in pivots:
            if (rows[i] >> free) & 1:
                v |= 1 << c
        basis.append(v)
    return basis


@dataclass(frozen=True)
class EliminationResult:
    """Reduced form of ``z H^T = s`` over the erased columns.

    ``dependent_columns[i]`` takes the value
    ``completion_offset[i] ^ <completion_matrix row i, z>`` where ``z`` are the
    values assigned to ``aa_columns`` (in that order).
    """

    rank: int
    aa_columns: tuple[int, ...]
    dependent_columns: tuple[int, ...]
    completion_matrix: BitMatrix
    completion_offset: tuple[int, ...]
    consistent: bool
    # pivots that still involve free columns after elimination (rho_A)
    residual_rank: int = field(default=0)

    @property
    def n_free(self) -> int:
        return len(self.aa_columns)

    def solve(self, aa_values: Sequence[int]) -> dict[int, int]:
        """Map column label -> bit for one assignment of the free columns."""
        if not self.consistent:
            raise ValueError("system is inconsistent")
        if len(aa_values) != len(self.aa_columns):
            raise ValueError("need one value per free column")
        z = pack_bits(aa_values)
        out = {c: int(b) & 1 for c, b in zip(self.aa_columns, aa_values)}
        for c, row, off in zip(self.dependent_columns, self.completion_matrix.rows,
                               self.completion_offset):
            out[c] = off ^ ((row & z).bit_count() & 1)
        return out


def diagonalize(h_erased: BitMatrix, syndrome: Sequence[int],
                labels: Sequence[int] | None = None) -> EliminationResult:
    """Gauss-Jordan reduction of ``z h_erased^T = syndrome``.

    Columns are processed in ascending order; the pivot for a column is the
    lowest-index row not yet used as a pivot.  ``labels`` renames the columns
    in the result (defaults to ``0..ncols-1``).
    """
    if len(syndrome) != h_erased.nrows:
        raise ValueError("syndrome length must equal the number of rows")
    ncols = h_erased.ncols
    if labels is None:
        labels = range(ncols)
    labels = list(labels)
    if len(labels) != ncols:
        raise ValueError("one label per column")

    rows = list(h_erased.rows)
    synd = [int(s) & 1 for s in syndrome]
    pivot_row_of: dict[int, int] = {}
    used = [False] * len(rows)
    for col in range(ncols):
        bit = 1 << col
        piv = None
        for i in range(len(rows)):
            if not used[i] and rows[i] & bit:
                piv = i
                break
        if piv is None:
            continue
        used[piv] = True
        pivot_row_of[col] = piv
        pr, ps = rows[piv], synd[piv]
        for i in range(len(rows)):
            if i != piv and rows[i] & bit:
                rows[i] ^= pr
                synd[i] ^= ps

    consistent = all(not (rows[i] == 0 and synd[i]) for i in range(len(rows)))
    free = [c for c in range(ncols) if c not in pivot_row_of]
    dep = sorted(pivot_row_of)
    free_pos = {c: k for k, c in enumerate(free)}
    mat_rows = []
    offset = []
    residual = 0
    for c in dep:
        r = rows[pivot_row_of[c]] & ~(1 << c)
        v = 0
        while r:
            low = r & -r
            j = low.bit_length() - 1
            v |= 1 << free_pos[j]
            r ^= low
        if v:
            residual += 1
        mat_rows.append(v)
        offset.append(synd[pivot_row_of[c]])
    return EliminationResult(
        rank=len(dep),
        aa_columns=tuple(labels[c] for c in free),
        dependent_columns=tuple(labels[c] for c in dep),
        completion_matrix=BitMatrix(len(dep), len(free), mat_rows),
        completion_offset=tuple(offset),
        consistent=consistent,
        residual_rank=residual,
    )


def log_binomial(n: int, k: int) -> float:
    """Natural log of C(n, k) via log-gamma."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"log_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
