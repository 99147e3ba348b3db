"""Parity-check matrix construction and Tanner-graph analysis."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .gf2core import BitMatrix, rank

ACYCLIC = "acyclic"


@dataclass(frozen=True)
class DegreeMatrix:
    """Exponents of a monomial parity-check matrix; -1 marks a zero entry."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise ValueError("degree matrix must be non-empty")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise ValueError("ragged degree matrix")
            for w in row:
                if w < -1:
                    raise ValueError(f"invalid degree {w}; use -1 for a zero entry")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "DegreeMatrix":
        return cls(tuple(tuple(int(w) for w in row) for row in rows))

    @property
    def band_rows(self) -> int:
        return len(self.entries)

    @property
    def band_cols(self) -> int:
        return len(self.entries[0])

    @property
    def memory(self) -> int:
        """Syndrome memory: the largest exponent."""
        return max(w for row in self.entries for w in row)

    def base_matrix(self) -> np.ndarray:
        return (np.array(self.entries) >= 0).astype(np.uint8)


@dataclass(frozen=True)
class ParityCheck:
    """Sparse binary parity-check matrix stored as per-row column lists."""

    n: int
    rows: tuple[tuple[int, ...], ...]
    degree_matrix: DegreeMatrix | None = None
    lift: int | None = None

    def __post_init__(self):
        for row in self.rows:
            if len(set(row)) != len(row):
                raise ValueError("duplicate column index in a row")
            if any(c < 0 or c >= self.n for c in row):
                raise ValueError("column index out of range")
            if list(row) != sorted(row):
                raise ValueError("row column indices must be sorted")

    @classmethod
    def from_array(cls, h) -> "ParityCheck":
        h = np.asarray(h) & 1
        return cls(n=h.shape[1], rows=tuple(tuple(int(j) for j in np.flatnonzero(r)) for r in h))

    @property
    def r(self) -> int:
        return len(self.rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.r, self.n), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            out[i, list(row)] = 1
        return out

    def to_bitmatrix(self) -> BitMatrix:
        packed = []
        for row in self.rows:
            v = 0
            for c in row:
                v |= 1 << c
            packed.append(v)
        return BitMatrix(self.r, self.n, packed)

    def columns(self) -> list[list[int]]:
        """Check indices touching each variable."""
        cols: list[list[int]] = [[] for _ in range(self.n)]
        for i, row in enumerate(self.rows):
            for c in row:
                cols[c].append(i)
        return cols

    def rank(self) -> int:
        return rank(self.to_bitmatrix())

    def dimension(self) -> int:
        return self.n - self.rank()

    @property
    def design_rate(self) -> float:
        return 1.0 - self.r / self.n


def expand_qc(w: DegreeMatrix, m_lift: int) -> ParityCheck:
    """Replace each exponent by the circulant ``P^w`` of size ``m_lift``.

    ``P`` is the identity with rows cyclically shifted one position to the
    right, so row ``t`` of ``P^w`` has its one in column ``(t + w) mod M``.
    """
    if m_lift <= w.memory:
        raise ValueError(f"lift size {m_lift} must exceed syndrome memory {w.memory}")
    M = m_lift
    rows = []
    for bi, brow in enumerate(w.entries):
        for t in range(M):
            cols = []
            for bj, e in enumerate(brow):
                if e >= 0:
                    cols.append(bj * M + (t + e) % M)
            rows.append(tuple(sorted(cols)))
    return ParityCheck(n=M * w.band_cols, rows=tuple(rows), degree_matrix=w, lift=M)


def sample_gallager(j_strips: int, k_weight: int, n: int, seed: int) -> ParityCheck:
    """Draw one (J, K)-regular code from the Gallager ensemble.

    The first strip is block diagonal with all-ones blocks of width K; every
    further strip is an independent uniform column permutation of it.
    Permutations come from numpy's PCG64 generator seeded with ``seed``.
    """
    if j_strips < 1 or k_weight < 1 or n < 1:
        raise ValueError("J, K and n must be positive")
    if n % k_weight:
        raise ValueError(f"K={k_weight} must divide n={n}")
    m = n // k_weight
    rng = np.random.Generator(np.random.PCG64(seed))
    strip1 = [tuple(range(j * k_weight, (j + 1) * k_weight)) for j in range(m)]
    rows = list(strip1)
    for _ in range(1, j_strips):
        perm = rng.permutation(n)
        # column c of the new strip is column perm[c] of strip 1
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        for row in strip1:
            rows.append(tuple(sorted(int(inv[c]) for c in row)))
    return ParityCheck(n=n, rows=tuple(rows))


def girth(h: ParityCheck) -> int | str:
    """Shortest cycle length of the Tanner graph, or ``ACYCLIC``.

    BFS from every variable node; every cycle passes through a variable node,
    and the shortest cycle through the BFS root is found exactly.
    """
    n = h.n
    var_adj = [[n + i for i in chks] for chks in h.columns()]
    chk_adj = [list(row) for row in h.rows]

    def nbrs(u):
        return var_adj[u] if u < n else chk_adj[u - n]

    best = None
    for root in range(n):
        if not var_adj[root]:
            continue
        dist = {root: 0}
        parent = {root: -1}
        q = deque([root])
        found = None
        while q:
            u = q.popleft()
            du = dist[u]
            bound = min(best or np.inf, found or np.inf)
            # any cycle closed from this level has length >= 2*du + 1
            if 2 * du + 1 >= bound:
                break
            for v in nbrs(u):
                if v == parent[u]:
                    continue
                if v in dist:
                    cyc = du + dist[v] + 1
                    if found is None or cyc < found:
                        found = cyc
                else:
                    dist[v] = du + 1
                    parent[v] = u
                    q.append(v)
        if found is not None and (best is None or found < best):
            best = found
    return ACYCLIC if best is None else best


def regularity(h: ParityCheck) -> tuple[float, float, bool]:
    col_w = np.zeros(h.n, dtype=np.int64)
    for row in h.rows:
        col_w[list(row)] += 1
    row_w = np.array([len(row) for row in h.rows], dtype=np.int64)
    avg_col = float(col_w.sum()) / h.n if h.n else 0.0
    avg_row = float(row_w.sum()) / h.r if h.r else 0.0
    regular = len(set(col_w.tolist())) <= 1 and len(set(row_w.tolist())) <= 1
    return avg_col, avg_row, regular


def parse_degree_matrix(text: str) -> tuple[DegreeMatrix, int]:
    """Parse ``"c-b c M"`` followed by ``c-b`` rows of ``c`` integers."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty degree-matrix file")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError("header must be 'c-b c M'")
    nrows, ncols, m_lift = (int(x) for x in header)
    body = lines[1:]
    if len(body) != nrows:
        raise ValueError(f"expected {nrows} rows, found {len(body)}")
    rows = []
    for k, ln in enumerate(body):
        vals = [int(x) for x in ln.split()]
        if len(vals) != ncols:
            raise ValueError(f"row {k + 1}: expected {ncols} entries, found {len(vals)}")
        for v in vals:
            if v < -1:
                raise ValueError(f"row {k + 1}: entry {v} below -1")
            if v >= m_lift:
                raise ValueError(f"row {k + 1}: entry {v} not below M={m_lift}")
        rows.append(vals)
    return DegreeMatrix.from_rows(rows), m_lift


def format_degree_matrix(w: DegreeMatrix, m_lift: int) -> str:
    lines = [f"{w.band_rows} {w.band_cols} {m_lift}"]
    for row in w.entries:
        lines.append(" ".join(str(e) for e in row))
    return "\n".join(lines) + "\n"


def load_qc_code(path: str | Path) -> ParityCheck:
    w, m_lift = parse_degree_matrix(Path(path).read_text())
    return expand_qc(w, m_lift)


def bundled_code_path(name: str) -> Path:
    """Path of a degree-matrix file shipped in ``ldpc_led/data``."""
    p = Path(__file__).parent / "data" / name
    if not p.exists():
        raise FileNotFoundError(name)
    return p
