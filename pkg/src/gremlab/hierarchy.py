"""Hierarchy order parameter, slopes, and the level coarse-graining algorithm.

An order parameter is a strictly increasing step function on (0, 1] given by
jump locations x_1 < ... < x_n = 1 and values q_1 < ... < q_n = 1.  Chord
slopes between step points, their field-dependent modification, and the
merging of levels into blocks with strictly decreasing modified slopes
determine which hierarchy survives in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gremlab.scalars import RemScaling, rem_scaling, rho, t_star


@dataclass(frozen=True)
class OrderParameter:
    """Validated step function: x locations and q values, both ending at 1."""

    x: tuple[float, ...]
    q: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def a(self) -> tuple[float, ...]:
        """Per-level standard deviations a_k = sqrt(q_k - q_{k-1})."""
        qq = (0.0,) + self.q
        return tuple(math.sqrt(qq[k + 1] - qq[k]) for k in range(self.n))

    def is_rem(self) -> bool:
        return self.n == 1


@dataclass(frozen=True)
class CoarseGraining:
    """Merged-block description produced by `coarse_grain`.

    J holds the selected boundary indices J_0 = 0 < J_1 < ... < J_m = n.
    Per block l (1-based): increments q_bar, x_bar, the chord slope
    theta_bar, the square root of the modified slope gamma_bar, and the
    block-optimal magnetization t_block.  `critical` marks that the
    defining strict inequality held only with equality somewhere.
    """

    op: OrderParameter
    h: float
    J: tuple[int, ...]
    q_bar: tuple[float, ...]
    x_bar: tuple[float, ...]
    theta_bar: tuple[float, ...]
    gamma_bar: tuple[float, ...]
    t_block: tuple[float, ...]
    critical: bool = False

    @property
    def m(self) -> int:
        return len(self.J) - 1


@dataclass(frozen=True)
class GremScaling:
    """Affine rescaling u(x) = shift + x/sqrt(N) for hierarchical extremes."""

    N: int
    shift: float
    block_scalings: tuple[RemScaling, ...]
    block_sizes: tuple[int, ...]
    exact_sizes: bool = True

    @property
    def slope(self) -> float:
        return 1.0 / math.sqrt(self.N)

    def forward(self, x: float) -> float:
        return self.shift + x * self.slope

    def inverse(self, y: float) -> float:
        return (y - self.shift) / self.slope


def validate_order_parameter(x, q) -> OrderParameter:
    """Check monotonicity and endpoint conditions, returning the parameter.

    Raises ValueError on empty input, length mismatch, non-increasing
    sequences, values outside (0, 1], or endpoints different from 1.
    """
    xs = tuple(float(v) for v in x)
    qs = tuple(float(v) for v in q)
    if len(xs) == 0:
        raise ValueError("order parameter needs at least one level")
    if len(xs) != len(qs):
        raise ValueError(f"x and q must have equal length, got {len(xs)} and {len(qs)}")
    for name, seq in (("x", xs), ("q", qs)):
        prev = 0.0
        for v in seq:
            if not v > prev:
                raise ValueError(f"{name} must be strictly increasing within (0, 1], got {seq}")
            prev = v
        if not math.isclose(seq[-1], 1.0, rel_tol=0.0, abs_tol=1e-12):
            raise ValueError(f"{name} must end at 1, got {seq[-1]}")
    # normalize the endpoints exactly to 1 so downstream identities are exact
    xs = xs[:-1] + (1.0,)
    qs = qs[:-1] + (1.0,)
    return OrderParameter(x=xs, q=qs)


def slope(op: OrderParameter, j: int, k: int) -> float:
    """Chord slope (q_k - q_{j-1}) / (x_k - x_{j-1}) with x_0 = q_0 = 0."""
    if not 1 <= j <= k <= op.n:
        raise IndexError(f"need 1 <= j <= k <= {op.n}, got j={j}, k={k}")
    qq = (0.0,) + op.q
    xx = (0.0,) + op.x
    return (qq[k] - qq[j - 1]) / (xx[k] - xx[j - 1])


def modified_slope(op: OrderParameter, j: int, k: int, h: float) -> float:
    """Field-modified slope theta / rho(t_star(theta^{-1/2} h))^2.

    At h = 0 this reduces to theta / (2 log 2).
    """
    th = slope(op, j, k)
    return th / rho(t_star(h / math.sqrt(th))) ** 2


def coarse_grain(op: OrderParameter, h: float) -> CoarseGraining:
    """Merge levels into blocks whose modified slopes strictly decrease.

    Starting from J_0 = 0, each J_l is the smallest index J > J_{l-1} whose
    leading modified slope dominates every modified slope reachable beyond
    it: theta~(J_{l-1}+1, J) > theta~(J+1, k) for all k > J.  J = n always
    qualifies vacuously, so the scan terminates.  When the minimal J
    satisfies the condition only with >= (a tie), that J is still selected
    and the result is flagged `critical`.

    At h = 0 the selected boundaries are exactly the vertices of the least
    concave majorant of the points (x_k, q_k).
    """
    if h < 0.0:
        raise ValueError(f"field strength must be nonnegative, got {h}")
    n = op.n
    tmod = {}

    def ms(j: int, k: int) -> float:
        if (j, k) not in tmod:
            tmod[(j, k)] = modified_slope(op, j, k, h)
        return tmod[(j, k)]

    J = [0]
    critical = False
    while J[-1] < n:
        start = J[-1] + 1
        chosen = None
        for cand in range(start, n + 1):
            lead = ms(start, cand)
            tie = False
            ok = True
            for k in range(cand + 1, n + 1):
                rest = ms(cand + 1, k)
                if lead < rest:
                    ok = False
                    break
                if lead == rest:
                    tie = True
            if ok:
                chosen = cand
                critical = critical or tie
                break
        J.append(chosen)

    qq = (0.0,) + op.q
    xx = (0.0,) + op.x
    q_bar, x_bar, theta_bar, gamma_bar, t_block = [], [], [], [], []
    for l in range(1, len(J)):
        jl, jp = J[l], J[l - 1]
        q_bar.append(qq[jl] - qq[jp])
        x_bar.append(xx[jl] - xx[jp])
        theta_bar.append(slope(op, jp + 1, jl))
        gamma_bar.append(math.sqrt(ms(jp + 1, jl)))
        t_block.append(t_star(h / math.sqrt(theta_bar[-1])))
    return CoarseGraining(
        op=op, h=h, J=tuple(J),
        q_bar=tuple(q_bar), x_bar=tuple(x_bar),
        theta_bar=tuple(theta_bar), gamma_bar=tuple(gamma_bar),
        t_block=tuple(t_block), critical=critical,
    )


def temperature_threshold(cg: CoarseGraining, beta: float) -> int:
    """Number of frozen blocks: largest l with beta * gamma_bar_l > 1 (else 0)."""
    if beta <= 0.0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    level = 0
    for l, g in enumerate(cg.gamma_bar, start=1):
        if beta * g > 1.0:
            level = l  # gamma_bar decreasing: frozen blocks form a prefix
    return level


def grem_scaling(op: OrderParameter, h: float, N: int) -> GremScaling:
    """Rescaling for hierarchical extremes: per-block centering, slope 1/sqrt(N).

    shift = sum_l q_bar_l^{1/2} B_{x_bar_l N}(theta_bar_l^{-1/2} h), with each
    block centered by `rem_scaling` at the block's size and tilted field.
    Block sizes x_bar_l * N are rounded to the nearest integer when not exact;
    `exact_sizes` records whether any rounding happened.
    """
    cg = coarse_grain(op, h)
    shift = 0.0
    scalings, sizes = [], []
    exact = True
    for l in range(cg.m):
        raw = cg.x_bar[l] * N
        n_l = round(raw)
        if abs(raw - n_l) > 1e-9:
            exact = False
        n_l = max(int(n_l), 1)
        sc = rem_scaling(n_l, h / math.sqrt(cg.theta_bar[l]))
        shift += math.sqrt(cg.q_bar[l]) * sc.B
        scalings.append(sc)
        sizes.append(n_l)
    return GremScaling(N=N, shift=shift, block_scalings=tuple(scalings),
                       block_sizes=tuple(sizes), exact_sizes=exact)


def grem_rescale(x: float, scaling: GremScaling, direction: str = "forward") -> float:
    """Apply the hierarchical affine scaling or its inverse."""
    if direction == "forward":
        return scaling.forward(x)
    if direction == "inverse":
        return scaling.inverse(x)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def rebuild_from_blocks(cg: CoarseGraining) -> OrderParameter:
    """Order parameter whose levels are the blocks of a coarse-graining."""
    x = tuple(np.cumsum(cg.x_bar))
    q = tuple(np.cumsum(cg.q_bar))
    return validate_order_parameter(x, q)
