"""Scalar special functions for the binary-entropy energy landscape.

Everything here is in natural logarithms. The central objects are the binary
large-deviation entropy I(t) of the magnetization, the energy density
rho(t) = sqrt(2(log 2 - I(t))), the tilted maximizer t_star(h) of
rho(t) + h*t, and the affine scaling (A_N, B_N) that centers the extremes of
2^N field-shifted Gaussians onto a standard Gumbel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LOG2 = math.log(2.0)
SQRT_2LOG2 = math.sqrt(2.0 * LOG2)

#: sentinel reported for the second derivative of the entropy at t = +-1
CURVATURE_INF = float("inf")


@dataclass(frozen=True)
class EntropyPoint:
    """Entropy value and first two derivatives at one magnetization."""

    t: float
    value: float
    d1: float
    d2: float


@dataclass(frozen=True)
class RemScaling:
    """Affine rescaling u(x) = A*x + B for the extremes at size N, field h."""

    N: int
    h: float
    A: float
    B: float
    t_star: float
    M: float

    def forward(self, x: float) -> float:
        return self.A * x + self.B

    def inverse(self, y: float) -> float:
        return (y - self.B) / self.A


def _check_magnetization(t: float) -> None:
    if not -1.0 <= t <= 1.0:
        raise ValueError(f"magnetization must lie in [-1, 1], got {t}")


def cramer_entropy(t: float) -> EntropyPoint:
    """Binary entropy I(t) = ((1-t)log(1-t) + (1+t)log(1+t))/2 with derivatives.

    Uses the convention 0*log 0 = 0 at the endpoints, where the value is
    log 2, the first derivative diverges and the curvature is reported as an
    infinite sentinel.
    """
    _check_magnetization(t)
    om, op = 1.0 - t, 1.0 + t
    value = 0.5 * ((om * math.log(om) if om > 0.0 else 0.0)
                   + (op * math.log(op) if op > 0.0 else 0.0))
    if om == 0.0 or op == 0.0:
        d1 = math.copysign(CURVATURE_INF, t)
        d2 = CURVATURE_INF
    else:
        d1 = math.atanh(t)
        d2 = 1.0 / (om * op)
    return EntropyPoint(t=t, value=value, d1=d1, d2=d2)


def rho(t: float) -> float:
    """Energy density sqrt(2(log 2 - I(t))); maximal at t=0, zero at t=+-1."""
    _check_magnetization(t)
    return math.sqrt(max(2.0 * (LOG2 - cramer_entropy(t).value), 0.0))


def t_star(h: float, tol: float = 1e-12) -> float:
    """Unique maximizer of t -> rho(t) + h*t on [-1, 1].

    Solves the stationarity condition I'(t) = h*rho(t) by bisection.
    g(t) = I'(t) - h*rho(t) is strictly increasing through the root on
    [0, 1), so bisection converges unconditionally.
    """
    if h < 0.0:
        raise ValueError(f"field strength must be nonnegative, got {h}")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    if h == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0 - 1e-12
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if math.atanh(mid) - h * rho(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ground_state_constant(h: float) -> float:
    """Limiting ground-state energy density M(h) = rho(t_star) + h*t_star."""
    ts = t_star(h)
    return rho(ts) + h * ts


def rem_scaling(N: int, h: float) -> RemScaling:
    """Centering and scale for the maximum of the 2^N field-shifted Gaussians.

    A = 1/(rho(t_star) sqrt(N)) and
    B = M(h) sqrt(N) + (A/2) log(A^2 / (2 pi (1 - t_star^2) (I''(t_star) + h^2))),
    chosen so that the expected number of energies above A*y + B tends to
    exp(-y).
    """
    if N < 1:
        raise ValueError(f"size must be >= 1, got {N}")
    ts = t_star(h)
    ep = cramer_entropy(ts)
    r = rho(ts)
    A = 1.0 / (r * math.sqrt(N))
    B = ground_state_constant(h) * math.sqrt(N) + 0.5 * A * math.log(
        A * A / (2.0 * math.pi * (1.0 - ts * ts) * (ep.d2 + h * h))
    )
    return RemScaling(N=N, h=h, A=A, B=B, t_star=ts, M=ground_state_constant(h))


def rem_rescale(x: float, scaling: RemScaling, direction: str = "forward") -> float:
    """Apply the affine scaling, or its inverse for direction='inverse'."""
    if direction == "forward":
        return scaling.forward(x)
    if direction == "inverse":
        return scaling.inverse(x)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def log_binomial_asymptotic(N: int, k: int, eps: float = 1e-9) -> float:
    """Stirling approximation of log C(N, k) through the 1/N correction.

    Returns log of sqrt(2/pi) 2^N exp(-N I(t)) / sqrt(N (1 - t^2)) times
    (1 + (1/12 - 1/(3(1-t^2)))/N) for t = (N - 2k)/N.  The residual relative
    error is O(1/N^2).  Degenerate magnetizations |t| > 1 - eps are rejected.
    """
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, {N}], got {k}")
    t = (N - 2 * k) / N
    if abs(t) > 1.0 - eps:
        raise ValueError(f"magnetization {t} too close to +-1 for the asymptotic")
    omt2 = 1.0 - t * t
    lead = (0.5 * math.log(2.0 / math.pi) + N * LOG2 - N * cramer_entropy(t).value
            - 0.5 * math.log(N * omt2))
    return lead + math.log1p((1.0 / 12.0 - 1.0 / (3.0 * omt2)) / N)
