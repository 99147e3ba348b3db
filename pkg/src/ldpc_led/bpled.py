"""BP followed by list erasure decoding for BPSK over AWGN.

When BP fails, the least reliable bits (by minimum |posterior LLR| over the
first ``g`` iterations) are erased, a mask erases half of the next window of
unreliable bits, and the LED list is searched in order of increasing flip
weight for the candidate closest to the channel output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .bpdec import LLR_CLIP, channel_llr, decoder_for, resolve_g
from .codes import ParityCheck
from .led import complete_many, led_decode, partial_word

BP_CONVERGED = "bp_converged"
LED_RECOVERED = "led_recovered"
FALLBACK = "fallback"


@dataclass(frozen=True)
class BpLedParams:
    """Decoder settings.

    ``alpha`` scales the total erasure count ``round(alpha * (1 - R) * n)``;
    ``beta * n`` sets the masked erasure count ``L2``.  With
    ``mask_kind="rm"`` ``L2`` is moved to a power of two so Reed-Muller masks
    exist; ``"random"`` keeps ``round(beta * n)`` with seeded random masks.
    """

    alpha: float = 1.0
    beta: float = 0.16
    n_masks: int = 10
    j_max: int = 256
    max_iter: int = 50
    g: int | str = "auto"
    mask_seed: int = 0
    mask_kind: str = "rm"
    max_free: int = 30

    def __post_init__(self):
        if self.n_masks < 1:
            raise ValueError("n_masks must be >= 1")
        if self.j_max < 1:
            raise ValueError("j_max must be >= 1")
        if self.mask_kind not in ("rm", "random"):
            raise ValueError("mask_kind must be 'rm' or 'random'")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")


def _round(x: float) -> int:
    return int(math.floor(x + 0.5))


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def resolve_l2(n: int, beta: float, mask_kind: str = "rm") -> int:
    target = _round(beta * n)
    if mask_kind == "random" or target == 0 or _is_pow2(target):
        return target
    lo, hi = 0.15 * n, 0.18 * n
    inside = [1 << k for k in range(0, int(hi).bit_length() + 1) if lo <= (1 << k) <= hi]
    if inside:
        return min(inside, key=lambda p: (abs(p - beta * n), p))
    below = [1 << k for k in range(0, int(hi).bit_length() + 1) if (1 << k) <= hi]
    return below[-1] if below else 0


def erasure_sizes(n: int, rate: float, params: BpLedParams) -> tuple[int, int, int]:
    """(nu, L1, L2) for a code of length ``n`` and rate ``rate``."""
    nu = _round(params.alpha * (1.0 - rate) * n)
    l2 = resolve_l2(n, params.beta, params.mask_kind)
    l1 = nu - l2
    if l1 < 0:
        raise ValueError(f"L2={l2} exceeds the total erasure count {nu}")
    if l1 + 2 * l2 > n:
        raise ValueError(f"L1 + 2*L2 = {l1 + 2 * l2} exceeds n={n}")
    return nu, l1, l2


def select_erasures(reliability, l1: int) -> np.ndarray:
    """Indices of the ``l1`` smallest reliabilities, ties to the lower index."""
    rel = np.asarray(reliability, dtype=float)
    if l1 > len(rel):
        raise ValueError("cannot erase more positions than the word has")
    order = np.lexsort((np.arange(len(rel)), rel))
    return np.sort(order[:l1])


def _rm_weight_half_codewords(m: int) -> list[np.ndarray]:
    """Codewords of RM(1, m) with weight 2**(m-1); linear monomials first."""
    length = 1 << m
    pos = np.arange(length)
    mono = [((pos >> i) & 1).astype(np.uint8) for i in range(m)]
    first = [mono[i] for i in reversed(range(m))]
    rest = []
    for a in range(1, 1 << m):
        w = np.zeros(length, dtype=np.uint8)
        for i in range(m):
            if (a >> i) & 1:
                w ^= mono[i]
        for a0 in (0, 1):
            word = w ^ a0
            if not (a0 == 0 and bin(a).count("1") == 1):
                rest.append(word)
    return first + rest


def make_masks(l2: int, n_masks: int, seed: int = 0) -> list[np.ndarray]:
    """Distinct length-``2*l2``, weight-``l2`` masks.

    For ``l2`` a power of two these are first-order Reed-Muller codewords:
    the ``m`` linear monomials come first, then the remaining codewords in
    a seeded order.  Otherwise distinct seeded random vectors are drawn.
    """
    if n_masks < 1:
        raise ValueError("n_masks must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    if l2 == 0:
        if n_masks > 1:
            raise ValueError("only one (empty) mask exists for L2 = 0")
        return [np.zeros(0, dtype=np.uint8)]
    if _is_pow2(l2):
        m = l2.bit_length()  # log2(l2) + 1
        pool = _rm_weight_half_codewords(m)
        if n_masks > len(pool):
            raise ValueError(f"RM(1,{m}) has only {len(pool)} weight-{l2} codewords")
        head = pool[:m]
        tail = [pool[m + i] for i in rng.permutation(len(pool) - m)]
        return [w.copy() for w in (head + tail)[:n_masks]]
    if n_masks > math.comb(2 * l2, l2):
        raise ValueError("more masks requested than distinct weight-L2 vectors exist")
    seen: set[bytes] = set()
    out = []
    while len(out) < n_masks:
        w = np.zeros(2 * l2, dtype=np.uint8)
        w[rng.choice(2 * l2, l2, replace=False)] = 1
        key = w.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(w)
    return out


def apply_mask(reliability, already_erased, mask) -> np.ndarray:
    """Erase the masked part of the next ``len(mask)`` least reliable positions."""
    rel = np.asarray(reliability, dtype=float)
    mask = np.asarray(mask, dtype=np.uint8)
    taken = np.zeros(len(rel), dtype=bool)
    taken[np.asarray(already_erased, dtype=np.int64)] = True
    if taken.sum() + len(mask) > len(rel):
        raise ValueError("window extends past the end of the word")
    order = np.lexsort((np.arange(len(rel)), rel))
    window = order[~taken[order]][: len(mask)]
    return np.sort(window[mask == 1])


def _colex_subsets(l: int, k: int) -> Iterator[tuple[int, ...]]:
    """k-subsets of range(l) in increasing order of sum(2**i)."""
    if k == 0:
        yield ()
        return
    for top in range(k - 1, l):
        for rest in _colex_subsets(top, k - 1):
            yield rest + (top,)


@lru_cache(maxsize=64)
def _weight_ordered(l: int, j_max: int) -> np.ndarray:
    total = min(j_max, 1 << l) if l < 63 else j_max
    out = np.zeros((total, l), dtype=np.uint8)
    row = 0
    for k in range(l + 1):
        for sub in _colex_subsets(l, k):
            if row == total:
                break
            out[row, list(sub)] = 1
            row += 1
        if row == total:
            break
    out.flags.writeable = False
    return out


def enumerate_weight_ordered(l: int, j_max: int) -> np.ndarray:
    """First ``min(j_max, 2**l)`` length-``l`` words by weight, then value.

    Entry ``i`` of a word is the coefficient of ``2**i``.
    """
    return _weight_ordered(int(l), int(j_max))


def metric(channel, candidate) -> float:
    """Squared Euclidean distance from ``channel`` to the BPSK image ``2c - 1``."""
    r = np.asarray(channel, dtype=float)
    c = np.asarray(candidate)
    if r.shape != c.shape:
        raise ValueError("length mismatch")
    return float(np.sum((r - (2.0 * c - 1.0)) ** 2))


def _metrics(r: np.ndarray, cands: np.ndarray) -> np.ndarray:
    return np.sum((r[None, :] - (2.0 * cands - 1.0)) ** 2, axis=1)


def hard_decision(channel) -> np.ndarray:
    """Bit 1 for positive channel values; zero maps to bit 0."""
    return (np.asarray(channel) > 0).astype(np.uint8)


class BpLedDecoder:
    """Precomputed masks and sizes for decoding many frames of one code."""

    def __init__(self, h: ParityCheck, params: BpLedParams = BpLedParams(),
                 rate: float | None = None):
        self.h = h
        self.params = params
        self.rate = h.design_rate if rate is None else rate
        self.nu, self.l1, self.l2 = erasure_sizes(h.n, self.rate, params)
        n_masks = 1 if self.l2 == 0 else params.n_masks
        self.masks = make_masks(self.l2, n_masks, params.mask_seed)
        self.g = resolve_g(h, params.max_iter, params.g)
        self.bp = decoder_for(h)

    def post_process(self, channel, bp_hard, reliability) -> np.ndarray | None:
        """Search the LED lists after a BP failure; ``None`` if all masks fail."""
        r = np.asarray(channel, dtype=float)
        hard_r = hard_decision(r)
        first = select_erasures(reliability, self.l1)
        best, best_mu = None, math.inf
        for mask in self.masks:
            second = apply_mask(reliability, first, mask)
            xi = partial_word(bp_hard, np.concatenate((first, second)))
            res = led_decode(self.h, xi)
            if not res.consistent or res.n_free > self.params.max_free:
                continue
            aa = np.asarray(res.aa_positions, dtype=np.int64)
            flips = enumerate_weight_ordered(res.n_free, self.params.j_max)
            cands = complete_many(res, hard_r[aa][None, :] ^ flips)
            mu = _metrics(r, cands)
            k = int(np.argmin(mu))
            if mu[k] < best_mu:
                best, best_mu = cands[k].copy(), float(mu[k])
        return best

    def decode(self, channel, sigma: float) -> tuple[np.ndarray, str]:
        r = np.asarray(channel, dtype=float)
        if r.shape != (self.h.n,):
            raise ValueError(f"channel vector must have length {self.h.n}")
        res = self.bp.decode(channel_llr(r, sigma), self.params.max_iter, self.g)
        if res.converged:
            return res.hard, BP_CONVERGED
        best = self.post_process(r, res.hard, res.reliability)
        if best is None:
            return res.hard, FALLBACK
        return best, LED_RECOVERED


def bp_led_decode(h: ParityCheck, channel, sigma: float,
                  params: BpLedParams = BpLedParams(),
                  rate: float | None = None) -> tuple[np.ndarray, str]:
    """Decode one received vector; returns ``(codeword, status)``."""
    return BpLedDecoder(h, params, rate).decode(channel, sigma)


def symbol_probs_to_bit_llrs(symbol_probs: Sequence[float]) -> np.ndarray:
    """Per-bit LLRs from a distribution over GF(2**m) symbols.

    Bit ``j`` (0-based) is bit ``j`` of the integer label of the symbol, least
    significant first.  LLRs favor bit 0 when positive and are clipped.
    """
    p = np.asarray(symbol_probs, dtype=float)
    q = len(p)
    if q < 2 or not _is_pow2(q):
        raise ValueError("number of symbol probabilities must be a power of two >= 2")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("symbol probabilities must be nonnegative and sum to 1")
    m = q.bit_length() - 1
    labels = np.arange(q)
    out = np.empty(m)
    for j in range(m):
        zero = ((labels >> j) & 1) == 0
        p0 = p[zero].sum()
        p1 = p[~zero].sum()
        with np.errstate(divide="ignore"):
            out[j] = np.log(p0) - np.log(p1)
    return np.clip(out, -LLR_CLIP, LLR_CLIP)
