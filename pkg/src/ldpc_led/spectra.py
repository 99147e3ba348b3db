"""Ensemble-average weight spectra of Gallager-type LDPC ensembles.

Strip enumerators are exact (Python integers, or fractions for binary images
of nonbinary codes).  Averages are moved to the natural-log domain at once;
``E{A_{n,w}}`` overflows doubles for moderate ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .gf2core import log_binomial


@dataclass(frozen=True)
class SpectrumTable:
    """``log_avg[w] = ln E{A_{n,w}}`` (``-inf`` where the average is zero)."""

    n: int
    log_avg: np.ndarray
    exact_strip: tuple | None = None
    params: dict | None = None

    def __post_init__(self):
        if len(self.log_avg) != self.n + 1:
            raise ValueError("log_avg must have n + 1 entries")

    def support(self) -> np.ndarray:
        return np.flatnonzero(np.isfinite(self.log_avg))


def _poly_mul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out


def check_enumerator(k_weight: int) -> list[int]:
    """Coefficients of ((1+s)^K + (1-s)^K) / 2: even-weight words of length K."""
    return [math.comb(k_weight, i) if i % 2 == 0 else 0 for i in range(k_weight + 1)]


def strip_spectrum(k_weight: int, m_blocks: int) -> list[int]:
    """Weight enumerator of one strip of ``m_blocks`` disjoint weight-K checks.

    Built by the convolution recurrence ``G_j = g * G_{j-1}``.
    """
    if k_weight < 1 or m_blocks < 1:
        raise ValueError("K and M must be positive")
    g = check_enumerator(k_weight)
    taps = [(i, gi) for i, gi in enumerate(g) if gi]
    G = np.array(g, dtype=object)
    for _ in range(2, m_blocks + 1):
        nxt = np.zeros(len(G) + k_weight, dtype=object)
        for i, gi in taps:
            nxt[i:i + len(G)] += gi * G
        G = nxt
    G = [int(x) for x in G]
    return G


def _log_exact(x) -> float:
    if x == 0:
        return -math.inf
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def _average_from_strip(G: Sequence, j_strips: int, n: int) -> np.ndarray:
    out = np.full(n + 1, -np.inf)
    for w, gw in enumerate(G):
        if gw:
            out[w] = (1 - j_strips) * log_binomial(n, w) + j_strips * _log_exact(gw)
    return out


def gallager_avg_spectrum(j_strips: int, k_weight: int, n: int) -> SpectrumTable:
    """``ln E{A_{n,w}} = (1 - J) ln C(n, w) + J ln G_{n,w}``."""
    if n % k_weight:
        raise ValueError(f"K={k_weight} must divide n={n}")
    if j_strips < 1:
        raise ValueError("J must be positive")
    G = strip_spectrum(k_weight, n // k_weight)
    return SpectrumTable(n=n, log_avg=_average_from_strip(G, j_strips, n),
                         exact_strip=tuple(G),
                         params={"J": j_strips, "K": k_weight, "n": n, "m": 1})


def nonbinary_check_enumerator(k_weight: int, q: int) -> list[int]:
    """Symbol-weight enumerator ``((1+(q-1)p)^K + (q-1)(1-p)^K) / q`` of one check."""
    out = []
    for i in range(k_weight + 1):
        num = math.comb(k_weight, i) * ((q - 1) ** i + (q - 1) * (-1) ** i)
        assert num % q == 0
        out.append(num // q)
    return out


def nb_strip_spectrum(k_weight: int, m_blocks: int, m_bits: int) -> list[Fraction]:
    """Average binary-image weight enumerator of a strip over GF(2^m).

    Symbol enumerator ``F = f^M`` composed with the per-symbol image
    enumerator ``psi(s) = ((1+s)^m - 1) / (q - 1)``.
    """
    if m_bits < 1:
        raise ValueError("m must be >= 1")
    q = 1 << m_bits
    f = nonbinary_check_enumerator(k_weight, q)
    F = [1]
    for _ in range(m_blocks):
        F = _poly_mul(F, f)
    psi = [Fraction(0)] + [Fraction(math.comb(m_bits, i), q - 1) for i in range(1, m_bits + 1)]
    n_b = k_weight * m_blocks * m_bits
    G = [Fraction(0)] * (n_b + 1)
    power = [Fraction(1)]
    for w, Fw in enumerate(F):
        if Fw:
            for d, c in enumerate(power):
                G[d] += Fw * c
        power = _poly_mul(power, psi)
    return G


def nb_image_avg_spectrum(j_strips: int, k_weight: int, n_symbols: int,
                          m_bits: int) -> SpectrumTable:
    """Ensemble spectrum of binary images of (J, K)-regular codes over GF(2^m).

    Averaging follows the binary case at image length ``n_symbols * m``.
    """
    if m_bits < 1:
        raise ValueError("field size must be 2^m with m >= 1")
    if n_symbols % k_weight:
        raise ValueError(f"K={k_weight} must divide n={n_symbols}")
    G = nb_strip_spectrum(k_weight, n_symbols // k_weight, m_bits)
    if m_bits == 1:
        G = [int(x) for x in G]
    n_b = n_symbols * m_bits
    return SpectrumTable(n=n_b, log_avg=_average_from_strip(G, j_strips, n_b),
                         exact_strip=tuple(G),
                         params={"J": j_strips, "K": k_weight, "n": n_symbols, "m": m_bits})


def random_code_spectrum(n: int, rate: float) -> SpectrumTable:
    """Average spectrum of random linear codes: ``C(n, w) 2^{-n(1-R)}``, w > 0."""
    out = np.array([log_binomial(n, w) for w in range(n + 1)]) - n * (1.0 - rate) * math.log(2)
    out[0] = 0.0
    return SpectrumTable(n=n, log_avg=out, params={"random": True, "R": rate})


def format_spectrum(table: SpectrumTable) -> str:
    p = table.params or {}
    lines = [f"# J={p.get('J', '')} K={p.get('K', '')} n={p.get('n', table.n)} m={p.get('m', 1)}",
             "# w ln_E"]
    for w, v in enumerate(table.log_avg):
        lines.append(f"{w} {'-inf' if v == -np.inf else repr(float(v))}")
    return "\n".join(lines) + "\n"


def parse_spectrum(text: str) -> SpectrumTable:
    params: dict = {}
    pairs = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("#"):
            for tok in ln[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    if v:
                        params[k] = int(v)
            continue
        w, v = ln.split()
        pairs.append((int(w), float(v)))
    if not pairs:
        raise ValueError("spectrum file has no entries")
    n = max(w for w, _ in pairs)
    log_avg = np.full(n + 1, -np.inf)
    for w, v in pairs:
        log_avg[w] = v
    return SpectrumTable(n=n, log_avg=log_avg, params=params or None)


def write_spectrum(table: SpectrumTable, path: str | Path) -> None:
    Path(path).write_text(format_spectrum(table))


def read_spectrum(path: str | Path) -> SpectrumTable:
    return parse_spectrum(Path(path).read_text())
