"""Monte-Carlo FER simulation of BP and BP-LED over BPSK/AWGN.

The all-zero codeword is sent by default; the channel and both decoders are
symmetric, so the error rate does not depend on the transmitted codeword.
Each trial draws its noise from its own counter-based Philox stream keyed by
``(master_seed, snr_index)`` with the trial index in the counter, so results
do not depend on batching or on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bpdec import channel_llr
from .bpled import BpLedDecoder, BpLedParams
from .codes import ParityCheck

CSV_COLUMNS = ("snr_db", "trials", "bp_errors", "bpled_errors", "fer_bp", "fer_bpled",
               "seed", "wall_seconds", "censored")
CHUNK = 256


@dataclass(frozen=True)
class ChannelConfig:
    """Unit-energy BPSK at a given Eb/N0; ``sigma^2 = 1 / (2 R 10^(dB/10))``."""

    rate: float
    snr_db: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.rate * 10.0 ** (self.snr_db / 10.0)))


@dataclass(frozen=True)
class FerRecord:
    snr_db: float
    trials: int
    bp_errors: int
    bpled_errors: int
    fer_bp: float
    fer_bpled: float
    seed: int
    wall_seconds: float
    censored: bool = False


def trial_rng(master_seed: int, snr_index: int, trial: int) -> np.random.Generator:
    key = np.random.SeedSequence([int(master_seed), int(snr_index)]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, int(trial), 0, 0]))


def awgn_llr(codeword, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Channel output ``(2c - 1) + noise``; LLRs are formed by the decoder."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    c = np.asarray(codeword, dtype=float)
    return (2.0 * c - 1.0) + sigma * rng.standard_normal(c.shape)


def _run_chunk(h: ParityCheck, params: BpLedParams, rate: float, sigma: float,
               master_seed: int, snr_index: int, start: int, stop: int,
               codeword: np.ndarray, stop_after: int | None = None):
    """Per-trial (bp_error, bpled_error) flags for trials ``start..stop-1``.

    With ``stop_after`` the chunk ends early once that many BP-LED errors
    have been seen; the flags are still exact for every returned trial.
    """
    dec = BpLedDecoder(h, params, rate)
    r = np.stack([awgn_llr(codeword, sigma, trial_rng(master_seed, snr_index, t))
                  for t in range(start, stop)])
    bp = dec.bp.decode_batch(channel_llr(r, sigma), params.max_iter, dec.g)
    bp_err = np.any(bp.hard != codeword[None, :], axis=1)
    led_err = bp_err.copy()
    seen = 0
    for i in range(stop - start):
        if bp_err[i] and not bp.converged[i]:
            best = dec.post_process(r[i], bp.hard[i], bp.reliability[i])
            if best is not None:
                led_err[i] = bool(np.any(best != codeword))
        seen += int(led_err[i])
        if stop_after is not None and seen >= stop_after:
            return bp_err[: i + 1], led_err[: i + 1]
    return bp_err, led_err


def run_fer(code: ParityCheck, params: BpLedParams, snr_grid: Sequence[float],
            stop_errors: int = 100, max_trials: int = 1_000_000, master_seed: int = 0,
            rate: float | None = None, threads: int = 1, chunk: int = CHUNK,
            codeword=None) -> list[FerRecord]:
    """Simulate every SNR point until ``stop_errors`` BP-LED errors or ``max_trials``.

    ``rate`` (default: the design rate) sets the Eb/N0 to sigma conversion.
    """
    if len(snr_grid) == 0:
        raise ValueError("SNR grid is empty")
    if stop_errors < 1:
        raise ValueError("stop_errors must be >= 1")
    if max_trials < 0:
        raise ValueError("max_trials must be >= 0")
    rate = code.design_rate if rate is None else rate
    cw = np.zeros(code.n, dtype=np.uint8) if codeword is None else np.asarray(codeword, np.uint8)
    if cw.shape != (code.n,):
        raise ValueError("codeword length does not match the code")
    BpLedDecoder(code, params, rate)  # validate parameters up front
    if max_trials == 0:
        return []
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        return [_run_point(code, params, rate, snr, k, stop_errors, max_trials,
                           master_seed, pool, threads, chunk, cw)
                for k, snr in enumerate(snr_grid)]
    finally:
        if pool is not None:
            pool.shutdown()


def _run_point(code, params, rate, snr, k, stop_errors, max_trials, seed, pool,
               threads, chunk, cw) -> FerRecord:
    t0 = time.perf_counter()
    sigma = ChannelConfig(rate, snr).sigma
    starts = range(0, max_trials, chunk)
    bp_total = led_total = trials = 0

    def job(s):
        args = (code, params, rate, sigma, seed, k, s, min(s + chunk, max_trials), cw)
        if pool is None:
            return _run_chunk(*args, stop_after=stop_errors - led_total)
        return pool.submit(_run_chunk, *args)

    pending: list = []
    it = iter(starts)
    done = False
    while not done:
        if pool is None:
            s = next(it, None)
            if s is None:
                break
            results = [job(s)]
        else:
            while len(pending) < 2 * threads:
                s = next(it, None)
                if s is None:
                    break
                pending.append(job(s))
            if not pending:
                break
            results = [pending.pop(0).result()]
        for bp_err, led_err in results:
            need = stop_errors - led_total
            cum = np.cumsum(led_err)
            hit = np.flatnonzero(cum >= need)
            if hit.size:
                end = int(hit[0]) + 1
                bp_err, led_err = bp_err[:end], led_err[:end]
                done = True
            trials += len(bp_err)
            bp_total += int(bp_err.sum())
            led_total += int(led_err.sum())
    for f in pending:
        f.cancel()
    return FerRecord(snr_db=float(snr), trials=trials, bp_errors=bp_total,
                     bpled_errors=led_total,
                     fer_bp=bp_total / trials if trials else 0.0,
                     fer_bpled=led_total / trials if trials else 0.0,
                     seed=int(seed), wall_seconds=time.perf_counter() - t0,
                     censored=led_total < stop_errors)


def format_fer_csv(records: Sequence[FerRecord], timing: bool = True) -> str:
    """CSV text with a header row; ``timing=False`` zeroes ``wall_seconds``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([repr(r.snr_db), r.trials, r.bp_errors, r.bpled_errors, repr(r.fer_bp),
                    repr(r.fer_bpled), r.seed,
                    f"{r.wall_seconds:.3f}" if timing else "0",
                    int(r.censored)])
    return buf.getvalue()


def parse_fer_csv(text: str) -> list[FerRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [FerRecord(snr_db=float(r["snr_db"]), trials=int(r["trials"]),
                      bp_errors=int(r["bp_errors"]), bpled_errors=int(r["bpled_errors"]),
                      fer_bp=float(r["fer_bp"]), fer_bpled=float(r["fer_bpled"]),
                      seed=int(r["seed"]), wall_seconds=float(r["wall_seconds"]),
                      censored=bool(int(r.get("censored", 0) or 0)))
            for r in rows]
