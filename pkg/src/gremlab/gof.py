"""Goodness-of-fit harness: KS tests against closed-form references, Poisson
interval-count checks, and Hill tail-index estimation.

Critical values are asymptotic; every acceptance sample here has at least a
few hundred points, where the small-sample bias of the asymptotic constants
is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.stats

# two-sided asymptotic KS multipliers c(alpha) = sqrt(-log(alpha/2)/2)
KS_COEFF_1PCT = math.sqrt(-math.log(0.005) / 2.0)
KS_COEFF_5PCT = math.sqrt(-math.log(0.025) / 2.0)
Z_CRIT_1PCT = 2.5758293035489004
Z_CRIT_5PCT = 1.959963984540054


@dataclass(frozen=True)
class GofReport:
    """Test statistic with its asymptotic critical values and pass flags."""

    test: str
    statistic: float
    sample_size: int
    critical_1pct: float
    critical_5pct: float
    pass_1pct: bool
    pass_5pct: bool
    detail: str = ""


_REFERENCE_CDF = {
    "gumbel": lambda x: np.exp(-np.exp(-np.asarray(x, dtype=float))),
    "exponential": lambda x: np.where(np.asarray(x, dtype=float) >= 0,
                                      -np.expm1(-np.asarray(x, dtype=float)), 0.0),
    "uniform": lambda x: np.clip(np.asarray(x, dtype=float), 0.0, 1.0),
}


def _report(test: str, stat: float, n: int, c1: float, c5: float, detail: str = "") -> GofReport:
    return GofReport(test=test, statistic=float(stat), sample_size=n,
                     critical_1pct=c1, critical_5pct=c5,
                     pass_1pct=bool(stat < c1), pass_5pct=bool(stat < c5),
                     detail=detail)


def ks_test(sample, cdf: str) -> GofReport:
    """Two-sided KS distance of the sample against a named reference CDF.

    Supported references: 'gumbel' (exp(-e^{-x})), 'exponential', 'uniform'.
    """
    xs = np.sort(np.asarray(sample, dtype=float))
    if xs.size < 20:
        raise ValueError(f"need at least 20 points, got {xs.size}")
    if cdf not in _REFERENCE_CDF:
        raise ValueError(f"unknown reference {cdf!r}; know {sorted(_REFERENCE_CDF)}")
    f = _REFERENCE_CDF[cdf](xs)
    n = xs.size
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    d = float(max(np.max(ecdf_hi - f), np.max(f - ecdf_lo)))
    sq = math.sqrt(n)
    return _report(f"ks-{cdf}", d, n, KS_COEFF_1PCT / sq, KS_COEFF_5PCT / sq)


def ks_two_sample(sample_a, sample_b) -> GofReport:
    """Two-sample KS distance with asymptotic critical values."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 20 or b.size < 20:
        raise ValueError("need at least 20 points on each side")
    d = float(scipy.stats.ks_2samp(a, b, method="asymp").statistic)
    scale = math.sqrt((a.size + b.size) / (a.size * b.size))
    return _report("ks-two-sample", d, a.size + b.size,
                   KS_COEFF_1PCT * scale, KS_COEFF_5PCT * scale,
                   detail=f"n={a.size}; m={b.size}")


def poisson_interval_counts(samples, interval) -> tuple[GofReport, GofReport]:
    """Mean and variance z-tests of point counts in [a, b] against Poisson.

    Each element of `samples` is a PointSample (or bare sequence) whose
    truncation must reach below a; the Poisson mean is e^{-a} - e^{-b}.
    Returns (mean report, variance report) with |z| as the statistic.
    """
    a, b = interval
    if not b > a:
        raise ValueError(f"need b > a, got [{a}, {b}]")
    mu = math.exp(-a) - (0.0 if math.isinf(b) else math.exp(-b))
    counts = []
    for s in samples:
        pts = np.asarray(getattr(s, "points", s), dtype=float)
        if pts.size and pts.min() > a:
            raise ValueError(
                f"sample truncated above the interval start (min point {pts.min()} > {a})")
        counts.append(int(np.count_nonzero((pts >= a) & (pts <= b))))
    c = np.asarray(counts, dtype=float)
    n = c.size
    if n < 2:
        raise ValueError("need at least 2 samples")
    z_mean = (c.mean() - mu) / math.sqrt(mu / n)
    # Var(s^2) for Poisson: (mu + 2 mu^2)/n
    z_var = (c.var(ddof=1) - mu) / math.sqrt((mu + 2 * mu * mu) / n)
    det = f"interval=[{a}; {b}] mu={mu:.6f} mean={c.mean():.4f} var={c.var(ddof=1):.4f}"
    return (_report("poisson-count-mean", abs(z_mean), n, Z_CRIT_1PCT, Z_CRIT_5PCT, det),
            _report("poisson-count-var", abs(z_var), n, Z_CRIT_1PCT, Z_CRIT_5PCT, det))


@dataclass(frozen=True)
class HillEstimate:
    """Hill tail-index estimate with asymptotic confidence interval."""

    alpha: float
    ci_low: float
    ci_high: float
    exceedances: int
    light_tail_suspect: bool


def hill_tail_index(values, top_fraction: float = 0.1) -> HillEstimate:
    """Hill estimator of the tail index alpha (P(X > x) ~ x^{-alpha}).

    Uses the top `top_fraction` order statistics; the 95% CI is
    alpha * (1 +- 1.96/sqrt(k)).  For a true power law the estimate is
    stable in the fraction; light tails betray themselves by drifting
    upward as the fraction shrinks, so the estimate is flagged when the
    quarter-fraction probe exceeds it by more than 25% (or it exceeds 5).
    """
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0):
        raise ValueError("values must be positive")
    if not 0.0 < top_fraction <= 0.5:
        raise ValueError(f"top_fraction must lie in (0, 0.5], got {top_fraction}")

    def estimate(frac: float) -> tuple[float, int]:
        k = int(math.ceil(frac * v.size))
        if k < 20:
            raise ValueError(f"too few exceedances ({k} < 20)")
        srt = np.sort(v)[::-1]
        logs = np.log(srt[:k]) - math.log(srt[k] if k < v.size else srt[-1])
        hill = float(np.mean(logs))
        return 1.0 / hill, k

    alpha, k = estimate(top_fraction)
    probe = math.inf
    try:
        probe, _ = estimate(top_fraction / 4.0)
    except ValueError:
        pass
    width = 1.96 / math.sqrt(k)
    drift = probe / alpha - 1.0 if math.isfinite(probe) else math.inf
    return HillEstimate(alpha=alpha,
                        ci_low=alpha * (1.0 - width), ci_high=alpha * (1.0 + width),
                        exceedances=k,
                        light_tail_suspect=bool(drift > 0.25 or alpha > 5.0))
