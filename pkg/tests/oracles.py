"""Independent oracles used to freeze expected values.

Everything here is implemented from the defining formulas, not from the
library code paths under test: high-precision golden-section maximization
for the tilted entropy problem, exact big-integer binomials, an upper
concave hull, and a literal transcription of the block-selection
min-condition driven by a scipy root-finder.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.optimize import brentq


def entropy(t: float) -> float:
    s = 0.0
    if 1 - t > 0:
        s += (1 - t) * math.log(1 - t)
    if 1 + t > 0:
        s += (1 + t) * math.log(1 + t)
    return 0.5 * s


def energy_density(t: float) -> float:
    return math.sqrt(max(2.0 * (math.log(2.0) - entropy(t)), 0.0))


def golden_max_mp(f, lo, hi, iters: int = 220):
    """Golden-section argmax in 40-digit arithmetic: immune to flat-top loss."""
    invphi = (mpmath.sqrt(5) - 1) / 2
    a, b = mpmath.mpf(lo), mpmath.mpf(hi)
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def tstar_oracle(h: float) -> float:
    """Maximizer of rho(t) + h t: double-precision grid bracketing, then a
    short golden-section refinement in 30-digit arithmetic (the flat top
    defeats pure double-precision value comparisons beyond ~1e-8)."""
    grid = np.linspace(-0.9999, 0.9999, 2001)
    coarse = np.array([energy_density(t) + h * t for t in grid])
    i = int(np.argmax(coarse))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    with mpmath.workdps(30):
        hh = mpmath.mpf(h)
        log2 = mpmath.log(2)

        def obj(t):
            one = mpmath.mpf(1)
            i_t = ((one - t) * mpmath.log(one - t) + (one + t) * mpmath.log(one + t)) / 2 \
                if abs(t) < 1 else log2
            return mpmath.sqrt(2 * (log2 - i_t)) + hh * t

        return float(golden_max_mp(obj, lo, hi, iters=65))


def ground_state_oracle(h: float) -> float:
    ts = tstar_oracle(h)
    return energy_density(ts) + h * ts


def exact_log_binomial(N: int, k: int) -> float:
    return math.log(math.comb(N, k))


def upper_concave_hull_indices(xs, qs) -> list[int]:
    """Vertex indices of the least concave majorant of ((0,0), (x_k, q_k))."""
    pts = [(0.0, 0.0)] + list(zip(xs, qs))
    hull = []  # indices into pts
    for i in range(len(pts)):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = pts[hull[-2]], pts[hull[-1]]
            x3, y3 = pts[i]
            # drop the middle point when it lies on or below the chord
            if (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull  # pts index == level index thanks to the origin at position 0


def tstar_root(h: float) -> float:
    """Independent solver: root of I'(t) = h rho(t) via brentq."""
    if h == 0.0:
        return 0.0
    g = lambda t: math.atanh(t) - h * energy_density(t)
    return brentq(g, 0.0, 1.0 - 1e-13, xtol=1e-13, rtol=8.9e-16)


def modified_slope_oracle(theta: float, h: float) -> float:
    return theta / energy_density(tstar_root(h / math.sqrt(theta))) ** 2


def coarse_grain_bruteforce(xs, qs, h: float):
    """Literal transcription of the block selection rule.

    Returns (J, critical): J_0 = 0 and each J_l is the minimal candidate
    whose leading modified slope weakly dominates every deeper one, with
    `critical` recording whether equality was ever needed.
    """
    n = len(xs)
    xx = [0.0] + list(xs)
    qq = [0.0] + list(qs)
    cache = {}

    def tmod(j, k):
        if (j, k) not in cache:
            th = (qq[k] - qq[j - 1]) / (xx[k] - xx[j - 1])
            cache[(j, k)] = modified_slope_oracle(th, h)
        return cache[(j, k)]

    J = [0]
    critical = False
    while J[-1] < n:
        start = J[-1] + 1
        for cand in range(start, n + 1):
            lead = tmod(start, cand)
            rest = [tmod(cand + 1, k) for k in range(cand + 1, n + 1)]
            if all(lead >= r for r in rest):
                critical = critical or any(lead == r for r in rest)
                J.append(cand)
                break
    return J, critical


def variational_dense_oracle(beta: float, h: float, n_grid: int = 200001) -> float:
    """Dense-grid maximization of the magnetization decomposition."""
    t = np.linspace(-1.0, 1.0, n_grid)
    log2 = math.log(2.0)
    om, op = 1.0 - t, 1.0 + t
    ival = 0.5 * (np.where(om > 0, om * np.log(np.where(om > 0, om, 1.0)), 0.0)
                  + np.where(op > 0, op * np.log(np.where(op > 0, op, 1.0)), 0.0))
    frac = 1.0 - ival / log2
    pos = frac > 1e-14
    b_eff = beta / np.sqrt(np.where(pos, frac, 1.0))
    bc = math.sqrt(2 * log2)
    p0 = np.where(b_eff <= bc, 0.5 * b_eff**2 + log2, b_eff * bc)
    rho_t = np.sqrt(np.maximum(2.0 * (log2 - ival), 0.0))
    vals = t * beta * h + np.where(pos, frac * p0, beta * rho_t)
    return float(vals.max())


def random_order_parameter(rng: np.random.Generator, max_levels: int = 6):
    """Random strictly increasing (x, q) pair ending at 1."""
    n = int(rng.integers(1, max_levels + 1))
    def cuts():
        c = np.sort(rng.uniform(0.05, 0.95, size=n - 1))
        # enforce minimal gaps so slopes stay sane
        full = np.concatenate([c, [1.0]])
        if n > 1 and np.min(np.diff(np.concatenate([[0.0], full]))) < 0.02:
            return None
        return full
    while True:
        x = cuts()
        if x is None:
            continue
        q = cuts()
        if q is not None:
            return list(x), list(q)
