import math

import numpy as np
import pytest

from ldpc_led.bpled import BpLedParams
from ldpc_led.codes import sample_gallager
from ldpc_led.gf2core import nullspace, unpack_bits
from ldpc_led.sim import (CSV_COLUMNS, ChannelConfig, FerRecord, awgn_llr, format_fer_csv,
                          parse_fer_csv, run_fer, trial_rng)

H48 = sample_gallager(3, 6, 48, seed=11)
PARAMS = BpLedParams(alpha=1.0, beta=0.16, n_masks=4, j_max=64)


def test_channel_config_sigma():
    assert ChannelConfig(0.5, 3.0).sigma ** 2 == pytest.approx(10 ** -0.3, rel=1e-12)
    assert ChannelConfig(0.5, 3.0).sigma ** 2 == pytest.approx(0.5012, abs=1e-4)
    with pytest.raises(ValueError):
        ChannelConfig(0.0, 1.0)


def test_awgn_vanishing_noise():
    c = np.array([0, 1, 1, 0])
    r = awgn_llr(c, 1e-9, trial_rng(0, 0, 0))
    assert np.all(np.abs(r - (2 * c - 1)) < 1e-6)


def test_awgn_same_stream_identical():
    c = np.zeros(50)
    a = awgn_llr(c, 0.8, trial_rng(3, 1, 17))
    b = awgn_llr(c, 0.8, trial_rng(3, 1, 17))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, awgn_llr(c, 0.8, trial_rng(3, 1, 18)))
    assert not np.array_equal(a, awgn_llr(c, 0.8, trial_rng(3, 2, 17)))


def test_awgn_statistics():
    n, sigma = 10**6, 0.7
    c = np.zeros(n)
    c[: n // 2] = 1
    r = awgn_llr(c, sigma, trial_rng(1, 0, 0))
    for part, mu in ((r[: n // 2], 1.0), (r[n // 2:], -1.0)):
        assert abs(part.mean() - mu) <= 4 * sigma / math.sqrt(len(part))
        assert part.var() == pytest.approx(sigma**2, rel=0.01)
    with pytest.raises(ValueError):
        awgn_llr(c, 0.0, trial_rng(1, 0, 0))


def test_record_invariants():
    recs = run_fer(H48, PARAMS, [1.0, 2.0], stop_errors=10, max_trials=5000, master_seed=2)
    assert [r.snr_db for r in recs] == [1.0, 2.0]
    for r in recs:
        assert r.bpled_errors <= r.bp_errors
        assert r.fer_bp == r.bp_errors / r.trials and r.fer_bpled == r.bpled_errors / r.trials
        assert r.bpled_errors == 10 and not r.censored


def test_results_independent_of_workers_and_chunking():
    kw = dict(stop_errors=8, max_trials=4000, master_seed=5)
    a = run_fer(H48, PARAMS, [1.5, 2.5], **kw)
    b = run_fer(H48, PARAMS, [1.5, 2.5], threads=2, **kw)
    c = run_fer(H48, PARAMS, [1.5, 2.5], chunk=7, **kw)
    assert format_fer_csv(a, timing=False) == format_fer_csv(b, timing=False)
    assert format_fer_csv(a, timing=False) == format_fer_csv(c, timing=False)


def test_censored_when_trial_budget_runs_out():
    (rec,) = run_fer(H48, PARAMS, [6.0], stop_errors=50, max_trials=100, master_seed=0)
    assert rec.censored and rec.trials == 100


def test_zero_trials_gives_no_records():
    assert run_fer(H48, PARAMS, [3.0], max_trials=0) == []
    assert format_fer_csv([]) == ",".join(CSV_COLUMNS) + "\n"


def test_bad_arguments():
    with pytest.raises(ValueError):
        run_fer(H48, PARAMS, [])
    with pytest.raises(ValueError):
        run_fer(H48, PARAMS, [1.0], stop_errors=0)


def test_nonzero_codeword_gives_same_error_rate():
    basis = [np.array(unpack_bits(v, 48), dtype=np.uint8) for v in nullspace(H48.to_bitmatrix())]
    rng = np.random.default_rng(0)
    cw = np.zeros(48, dtype=np.uint8)
    for b in basis:
        if rng.random() < 0.5:
            cw ^= b
    assert cw.any()
    kw = dict(stop_errors=10**6, max_trials=3000)
    (z,) = run_fer(H48, PARAMS, [2.0], master_seed=1, **kw)
    (nz,) = run_fer(H48, PARAMS, [2.0], master_seed=2, codeword=cw, **kw)
    for a, b in ((z.fer_bp, nz.fer_bp), (z.fer_bpled, nz.fer_bpled)):
        se = math.sqrt(a * (1 - a) / z.trials + b * (1 - b) / nz.trials)
        assert abs(a - b) <= 3 * se


def test_csv_roundtrip():
    recs = [FerRecord(3.0, 100, 7, 2, 0.07, 0.02, 9, 1.25, False),
            FerRecord(4.0, 50, 1, 0, 0.02, 0.0, 9, 0.5, True)]
    text = format_fer_csv(recs)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert parse_fer_csv(text) == recs
    assert "0.0" not in format_fer_csv(recs, timing=False).splitlines()[1].split(",")[7]
