"""Flooding sum-product decoder with reliability tracking.

LLR convention: positive favors bit 0.  With BPSK ``v = 2c - 1`` and AWGN
variance ``sigma**2`` the channel LLR is ``-2 r / sigma**2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .codes import ACYCLIC, ParityCheck, girth

LLR_CLIP = 25.0
_MAX_T = np.tanh(LLR_CLIP / 2)
_TINY = 1e-300


def channel_llr(r, sigma: float) -> np.ndarray:
    return np.clip(-2.0 * np.asarray(r, dtype=float) / sigma**2, -LLR_CLIP, LLR_CLIP)


@dataclass(frozen=True)
class BpResult:
    hard: np.ndarray
    reliability: np.ndarray
    converged: bool
    iterations_used: int


@dataclass
class BatchBpResult:
    hard: np.ndarray          # (B, n) uint8
    reliability: np.ndarray   # (B, n) float
    converged: np.ndarray     # (B,) bool
    iterations: np.ndarray    # (B,) int

    def __getitem__(self, i) -> BpResult:
        return BpResult(self.hard[i], self.reliability[i], bool(self.converged[i]),
                        int(self.iterations[i]))


class BpDecoder:
    """Edge tables for one parity-check matrix.

    A decoder keeps no state between calls besides the immutable tables, so
    one instance may serve one call at a time from each thread.
    """

    def __init__(self, h: ParityCheck):
        self.h = h
        self.n = h.n
        rows = [row for row in h.rows if row]
        self.edge_var = np.fromiter((c for row in rows for c in row), dtype=np.int64)
        deg = np.array([len(row) for row in rows], dtype=np.int64)
        self.edge_chk = np.repeat(np.arange(len(rows)), deg)
        self.chk_start = np.concatenate(([0], np.cumsum(deg)[:-1])) if len(rows) else np.zeros(0, np.int64)
        self.n_checks = len(rows)
        n_edges = len(self.edge_var)
        # (E x n) incidence, used to gather per-variable sums
        self.var_incidence = sp.csr_matrix(
            (np.ones(n_edges), (np.arange(n_edges), self.edge_var)), shape=(n_edges, self.n))

    def _check_sums(self, x: np.ndarray) -> np.ndarray:
        if self.n_checks == 0:
            return np.zeros((x.shape[0], 0), dtype=x.dtype)
        return np.add.reduceat(x, self.chk_start, axis=1)

    def syndrome_ok(self, hard: np.ndarray) -> np.ndarray:
        hard = np.atleast_2d(hard)
        if self.n_checks == 0:
            return np.ones(hard.shape[0], dtype=bool)
        par = self._check_sums(hard[:, self.edge_var].astype(np.int64)) & 1
        return ~par.any(axis=1)

    def decode_batch(self, llr, max_iter: int, g: int) -> BatchBpResult:
        llr = np.clip(np.atleast_2d(np.asarray(llr, dtype=float)), -LLR_CLIP, LLR_CLIP)
        B, n = llr.shape
        if n != self.n:
            raise ValueError(f"LLR length {n} does not match code length {self.n}")
        if not 1 <= g <= max_iter:
            raise ValueError("need 1 <= g <= max_iter")

        hard = np.zeros((B, n), dtype=np.uint8)
        rel = np.full((B, n), np.inf)
        converged = np.zeros(B, dtype=bool)
        iters = np.zeros(B, dtype=np.int64)

        active = np.arange(B)
        ch = llr
        c2v = np.zeros((B, len(self.edge_var)))
        post = ch.copy()
        for it in range(1, max_iter + 1):
            v2c = np.clip(post[:, self.edge_var] - c2v, -LLR_CLIP, LLR_CLIP)
            t = np.tanh(0.5 * v2c)
            logabs = np.log(np.maximum(np.abs(t), _TINY))
            neg = (t < 0).astype(np.int64)
            tot_log = self._check_sums(logabs)[:, self.edge_chk]
            tot_neg = self._check_sums(neg)[:, self.edge_chk]
            mag = np.exp(tot_log - logabs)
            sign = 1.0 - 2.0 * ((tot_neg - neg) & 1)
            prod = np.clip(sign * mag, -_MAX_T, _MAX_T)
            c2v = 2.0 * np.arctanh(prod)
            post = ch + (self.var_incidence.T @ c2v.T).T
            h_act = (post < 0).astype(np.uint8)
            if it <= g:
                rel[active] = np.minimum(rel[active], np.abs(post))
            ok = self.syndrome_ok(h_act)
            hard[active] = h_act
            iters[active] = it
            if ok.any():
                converged[active[ok]] = True
                keep = ~ok
                active, ch, c2v, post = active[keep], ch[keep], c2v[keep], post[keep]
            if active.size == 0:
                break
        return BatchBpResult(hard, rel, converged, iters)

    def decode(self, llr, max_iter: int, g: int) -> BpResult:
        return self.decode_batch(np.asarray(llr, dtype=float)[None, :], max_iter, g)[0]


@lru_cache(maxsize=16)
def decoder_for(h: ParityCheck) -> BpDecoder:
    return BpDecoder(h)


@lru_cache(maxsize=16)
def _girth_cached(h: ParityCheck):
    return girth(h)


def resolve_g(h: ParityCheck, max_iter: int, g: int | str | None = "auto") -> int:
    """Number of iterations over which reliabilities are tracked.

    ``"auto"`` uses the Tanner-graph girth, capped at ``max_iter``.
    """
    if g is None or g == "auto":
        gv = _girth_cached(h)
        if gv == ACYCLIC or gv > max_iter:
            return max_iter
        return int(gv)
    g = int(g)
    if not 1 <= g <= max_iter:
        raise ValueError("need 1 <= g <= max_iter")
    return g


def bp_decode(h: ParityCheck, llr, max_iter: int = 50, g: int | str | None = "auto") -> BpResult:
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (h.n,):
        raise ValueError(f"LLR vector must have length {h.n}")
    return decoder_for(h).decode(llr, max_iter, resolve_g(h, max_iter, g))


def syndrome_check(h: ParityCheck, word) -> bool:
    word = np.asarray(word, dtype=np.int64)
    if word.shape != (h.n,):
        raise ValueError(f"word must have length {h.n}")
    return all(int(word[list(row)].sum()) % 2 == 0 for row in h.rows)
