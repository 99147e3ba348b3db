"""Bounds on ML frame error rate over BPSK/AWGN and list-size analysis for LED.

All products of very large or very small factors are accumulated as sums of
logs.  Root finding is plain bisection throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln, log_ndtr, ndtr

from .spectra import SpectrumTable

_GL_NODES = 16


class NumericalError(RuntimeError):
    """A quadrature or root finder failed to reach its tolerance."""


class DegenerateSpectrumError(ValueError):
    """The spectrum admits no tangential-sphere radius."""


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Noise std dev for unit-energy BPSK: ``sigma^2 = 1 / (2 R 10^(dB/10))``."""
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def _gl(k: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to [0, 1]


def _logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        s = np.log(np.sum(np.exp(a - m_safe), axis=axis, keepdims=True)) + m_safe
    if axis is None:
        return s.reshape(())[()]
    return np.squeeze(s, axis=axis)


def log_sin_power_total(p: float) -> float:
    """ln of the integral of sin^p over [0, pi]."""
    return 0.5 * math.log(math.pi) + gammaln((p + 1) / 2) - gammaln(p / 2 + 1)


def log_sin_power_integral(p: float, theta, resolution: int = 1) -> np.ndarray:
    """ln of the integral of sin^p over [0, theta], theta in [0, pi].

    The integrand peaks at ``min(theta, pi/2)``; panels grow geometrically
    away from the peak, with ``resolution`` refining both the smallest panel
    and the growth rate.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty_like(th)
    upper = th > math.pi / 2
    low_part = np.where(upper, math.pi - th, th)
    logs = _log_sin_power_low(p, low_part, resolution)
    total = log_sin_power_total(p)
    out[~upper] = logs[~upper]
    with np.errstate(divide="ignore"):
        out[upper] = total + np.log1p(-np.exp(logs[upper] - total))
    return out if np.ndim(theta) else out[0]


def _log_sin_power_low(p: float, th: np.ndarray, resolution: int) -> np.ndarray:
    """Same integral for theta in [0, pi/2], peak at theta."""
    out = np.full(th.shape, -np.inf)
    pos = th > 0
    if not pos.any():
        return out
    t = th[pos]
    if p == 0:
        out[pos] = np.log(t)
        return out
    with np.errstate(divide="ignore"):
        scale = np.minimum(np.tan(t) / p, 1.0 / math.sqrt(p))
    scale = np.minimum(scale, t)
    q = max(int(resolution), 1)
    growth = 2.0 ** (1.0 / q)
    base = scale / q
    n_panels = int(np.ceil(np.max(np.log1p(t * (growth - 1) / base) / math.log(growth)))) + 1
    k = np.arange(n_panels + 1)
    edges = base[:, None] * (growth ** k[None, :] - 1.0) / (growth - 1.0)
    edges = np.minimum(edges, t[:, None])
    lo, hi = edges[:, :-1], edges[:, 1:]
    u, w = _gl(_GL_NODES * q)
    d = lo[:, :, None] + (hi - lo)[:, :, None] * u
    phi = t[:, None, None] - d
    with np.errstate(divide="ignore"):
        logf = p * (np.log(np.sin(phi)) - np.log(np.sin(t))[:, None, None])
        logw = np.log((hi - lo)[:, :, None] * w)
    terms = (logf + logw).reshape(len(t), -1)
    out[pos] = p * np.log(np.sin(t)) + _logsumexp(terms, axis=1)
    return out


def log_cap_fraction(p: float, theta, resolution: int = 1):
    """ln of (integral of sin^p over [0, theta]) / (integral over [0, pi])."""
    return log_sin_power_integral(p, theta, resolution) - log_sin_power_total(p)


def solve_theta0(n: int, rate: float, resolution: int = 1) -> float:
    """Cone half-angle whose solid-angle fraction is ``2^{-nR}``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    target = -n * rate * math.log(2.0)
    if target == 0.0:
        return math.pi
    p = n - 2

    def f(th):
        return float(log_cap_fraction(p, th, resolution)) - target

    lo, hi = 0.0, math.pi
    if f(hi) < 0:
        raise ValueError("no cone angle in (0, pi) solves the equation")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= 1e-12:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.spacing(hi):
            break
    mid = 0.5 * (lo + hi)
    if abs(f(mid)) > 1e-10:
        raise NumericalError(f"theta0 bisection stalled at residual {f(mid):.3e}")
    return mid


@dataclass(frozen=True)
class ShannonEval:
    n: int
    rate: float
    sigma: float
    theta0: float
    G: float
    log_fer: float

    @property
    def fer(self) -> float:
        return math.exp(self.log_fer)


def shannon_eval(n: int, rate: float, sigma: float, resolution: int = 1) -> ShannonEval:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    th = solve_theta0(n, rate, resolution)
    c, s = math.cos(th), math.sin(th)
    G = (c + math.sqrt(c * c + 4 * sigma * sigma)) / (2 * sigma)
    denom = G * s * s / sigma - c
    if denom <= 0 or s <= 0:
        log_fer = math.inf
    else:
        log_fer = (-0.5 * math.log(n * math.pi) - 0.5 * math.log1p(G * G) - math.log(s)
                   + n * (math.log(G * s) - 1 / (2 * sigma**2) + G * c / (2 * sigma))
                   - math.log(denom))
    return ShannonEval(n, rate, sigma, th, G, log_fer)


def shannon_lower(n: int, rate: float, sigma: float, resolution: int = 1) -> float:
    """Approximate sphere-packing lower bound on FER.

    The approximation is close to the exact bound for FER below about 0.1;
    larger values are returned unmodified.
    """
    return shannon_eval(n, rate, sigma, resolution).fer


# --- tangential sphere bound -------------------------------------------------

def _spectrum_terms(n: int, spectrum: SpectrumTable):
    if spectrum.n != n:
        raise ValueError(f"spectrum length {spectrum.n} does not match n={n}")
    w = np.arange(1, n)
    logs = spectrum.log_avg[1:n]
    keep = np.isfinite(logs)
    w, logs = w[keep], logs[keep]
    if len(w) == 0:
        raise DegenerateSpectrumError("spectrum has no nonzero weight in (0, n)")
    a = np.sqrt(w / (1.0 - w / n))
    return w, logs, a


def _r0_lhs(r: float, n: int, logs: np.ndarray, a: np.ndarray, resolution: int) -> float:
    """ln of the left side of the radius equation divided by its right side."""
    act = a < r
    if not act.any():
        return -math.inf
    ang = np.arccos(a[act] / r)
    return float(_logsumexp(logs[act] + log_cap_fraction(n - 3, ang, resolution)))


def solve_r0(n: int, spectrum: SpectrumTable, resolution: int = 1) -> float:
    """Cone radius of the tangential sphere bound, by bisection."""
    if n < 4:
        raise ValueError("n must be >= 4")
    _, logs, a = _spectrum_terms(n, spectrum)
    # as r grows every active term tends to half the full integral
    limit = float(_logsumexp(logs)) - math.log(2.0)
    if limit <= 0:
        raise DegenerateSpectrumError(
            "spectrum too sparse: the radius equation has no root (sum S_w <= 2)")
    lo = float(a.min())
    hi = 2.0 * lo
    while _r0_lhs(hi, n, logs, a, resolution) < 0:
        hi *= 2.0
        if hi > 1e12:
            raise DegenerateSpectrumError("no sign change of the radius equation")
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        fm = _r0_lhs(mid, n, logs, a, resolution)
        if abs(fm) <= 1e-10:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.spacing(hi):
            break
    mid = 0.5 * (lo + hi)
    if abs(_r0_lhs(mid, n, logs, a, resolution)) > 1e-8:
        raise NumericalError("radius bisection stalled")
    return mid


def chi2_logcdf(k: float, x) -> np.ndarray:
    """ln of the chi-squared CDF with ``k`` degrees of freedom.

    Regularized incomplete gamma where it is representable, a log-domain
    power series where it underflows.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = 0.5 * k
    z = 0.5 * np.maximum(x, 0.0)
    P = gammainc(a, z)
    with np.errstate(divide="ignore"):
        out = np.log(P)
    small = (P < 1e-280) & (z > 0)
    if small.any():
        zs = z[small]
        term = np.ones_like(zs)
        total = np.ones_like(zs)
        for j in range(1, 5000):
            term = term * zs / (a + j)
            total += term
            if np.all(term <= 1e-17 * total):
                break
        out[small] = a * np.log(zs) - zs - gammaln(a + 1) + np.log(total)
    return out[0] if scalar else out


def _gl_panels(lo: float, hi: float, step: float, k: int = 8):
    """Composite Gauss-Legendre nodes/weights on [lo, hi]."""
    m = max(1, int(math.ceil((hi - lo) / step)))
    edges = np.linspace(lo, hi, m + 1)
    return _gl_on_edges(edges, k)


def _gl_on_edges(edges: np.ndarray, k: int = 8):
    u, w = _gl(k)
    a, b = edges[:-1], edges[1:]
    x = (a[:, None] + (b - a)[:, None] * u).ravel()
    wt = ((b - a)[:, None] * w).ravel()
    return x, wt


@dataclass(frozen=True)
class TsbEval:
    n: int
    sigma: float
    r0: float
    w0: int
    value: float
    log_integral: float


def tsb_eval(n: int, spectrum: SpectrumTable, sigma: float, step: float | None = None,
             resolution: int = 1, r0: float | None = None) -> TsbEval:
    """Poltyrev tangential sphere bound; ``step`` is the panel width (default sigma/2)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    w, logs, a = _spectrum_terms(n, spectrum)
    if r0 is None:
        r0 = solve_r0(n, spectrum, resolution)
    w0 = int(math.floor(r0 * r0 * n / (r0 * r0 + n)))
    act = (w <= w0) & (a < r0)
    if step is None:
        step = 0.5 * sigma
    sqn = math.sqrt(n)

    # outer variable: radial noise component x, truncated far below its mean
    x_lo = min(-14.0 * sigma, sqn - step)
    xs, xw = _gl_panels(x_lo, sqn, step)
    t = 1.0 - xs / sqn
    log_outer_w = np.log(xw) + _log_norm_pdf(xs, sigma)

    rx = r0 * t
    with np.errstate(divide="ignore"):
        log_resid = np.log(gammaincc(0.5 * (n - 1), 0.5 * (rx / sigma) ** 2))

    if act.any():
        b = a[act]
        lS = logs[act]
        # inner variable u = y / t on [b_w, r0]; panel edges include every b_w
        uniform = np.linspace(b.min(), r0, max(2, int(math.ceil((r0 - b.min()) / step)) + 1))
        edges = np.unique(np.concatenate((uniform, b, [r0])))
        edges = edges[(edges >= b.min()) & (edges <= r0)]
        us, uw = _gl_on_edges(edges)
        n_pan = len(edges) - 1
        y = t[:, None] * us[None, :]
        arg = (t[:, None] ** 2) * (r0 * r0 - us[None, :] ** 2) / sigma**2
        log_int = _log_norm_pdf(y, sigma) + chi2_logcdf(n - 2, arg) + np.log(uw)[None, :]
        k = len(uw) // n_pan
        panel = _logsumexp(log_int.reshape(len(xs), n_pan, k), axis=2)
        # tail[:, j] = ln sum of panels j..end
        tail = np.logaddexp.accumulate(panel[:, ::-1], axis=1)[:, ::-1]
        start = np.searchsorted(edges, b)
        log_theta = np.log(t)[:, None] + tail[:, start]
        log_union = _logsumexp(lS[None, :] + log_theta, axis=1)
        log_brace = np.logaddexp(log_union, log_resid)
    else:
        log_brace = log_resid
    log_integral = float(_logsumexp(log_outer_w + log_brace))
    q_tail = float(ndtr(-sqn / sigma))
    val = math.exp(log_integral) + q_tail if log_integral < 700 else math.inf
    return TsbEval(n, sigma, r0, w0, min(1.0, val), log_integral)


def _log_norm_pdf(x, sigma: float):
    return -0.5 * (np.asarray(x) / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi))


def tsb_upper(n: int, spectrum: SpectrumTable, sigma: float, step: float | None = None,
              resolution: int = 1, verify: bool = False, rtol: float = 1e-6) -> float:
    """Tangential sphere upper bound on ML FER, clamped to at most 1.

    With ``verify`` the integral is recomputed at half the step and a
    :class:`NumericalError` is raised if the two disagree beyond ``rtol``.
    """
    ev = tsb_eval(n, spectrum, sigma, step, resolution)
    if verify:
        step = 0.5 * sigma if step is None else step
        fine = tsb_eval(n, spectrum, sigma, step / 2, resolution, r0=ev.r0)
        if ev.log_integral < 700 and abs(fine.value - ev.value) > rtol * abs(fine.value):
            raise NumericalError(
                f"TSB quadrature not converged: step {step:g} -> {ev.value!r}, "
                f"step {step / 2:g} -> {fine.value!r} (r0={ev.r0:.6g}, w0={ev.w0})")
    return ev.value


def union_bound(n: int, spectrum: SpectrumTable, sigma: float) -> float:
    w, logs, _ = _spectrum_terms(n, spectrum)
    terms = logs + log_ndtr(-np.sqrt(w) / sigma)
    return float(math.exp(_logsumexp(terms)) + ndtr(-math.sqrt(n) / sigma))


# --- list size analysis ------------------------------------------------------

def list_exponent(alpha: float, j: int, k: int) -> float:
    """Asymptotic exponent of the average LED list size per check."""
    if not 0 <= alpha <= k / j + 1e-12:
        raise ValueError("alpha must lie in [0, K/J]")
    base = max(0.0, 1.0 - alpha * j / k)
    return alpha - 1.0 + math.log2(1.0 + base**k)


def critical_alpha(j: int, k: int, tol: float = 1e-7) -> float:
    """Largest alpha in (0, 1] where the list exponent vanishes."""
    if j < 2 or k <= j:
        raise ValueError("need J >= 2 and K > J")
    hi = 1.0
    if list_exponent(hi, j, k) <= 0:
        return hi
    lo = hi
    while list_exponent(lo, j, k) >= 0:
        lo = round(lo - 0.01, 10)
        if lo <= 0:
            raise NumericalError("no negative value of the exponent found in (0, 1)")
    hi = lo + 0.01
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if list_exponent(mid, j, k) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log2_avg_list_bound(nu: int, n: int, r: int, k_weight: int) -> float:
    if not 0 <= nu <= n:
        raise ValueError("need 0 <= nu <= n")
    return (nu - r) + r * math.log2(1.0 + (1.0 - nu / n) ** k_weight)


def avg_list_bound(nu: int, n: int, r: int, k_weight: int) -> float:
    """Upper bound on the ensemble-average LED list size given ``nu`` erasures."""
    return 2.0 ** log2_avg_list_bound(nu, n, r, k_weight)
