"""Closed-form limiting quantities and the restricted/global transform pair.

The limiting free energy of the hierarchical model sums the frozen blocks'
ground-state contributions and keeps the unfrozen remainder annealed; the
limiting ground state is the fully frozen value.  For the single-level model
both a two-branch closed form and an independent variational route are
provided, plus a generic tabulated Legendre machinery linking restricted and
global free energies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gremlab.hierarchy import OrderParameter, coarse_grain, temperature_threshold
from gremlab.scalars import LOG2, SQRT_2LOG2, cramer_entropy, ground_state_constant, rho, t_star


def log_cosh(x: float) -> float:
    """Overflow-safe log cosh."""
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - LOG2


@dataclass(frozen=True)
class FreeEnergyCurve:
    """Free energy p(beta, h) tabulated on an increasing beta grid."""

    h: float
    beta_grid: tuple[float, ...]
    values: tuple[float, ...]
    threshold_levels: tuple[int, ...]


@dataclass(frozen=True)
class TabulatedFunction:
    """Function given by values on an increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or v.shape != g.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if g.size == 0:
            raise ValueError("empty tabulation")
        if g.size > 1 and not np.all(np.diff(g) > 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class TransformValue:
    """Result of a tabulated optimization: value, optimizer, boundary flag."""

    value: float
    arg: float
    boundary: bool


def grem_free_energy(op: OrderParameter, h: float, beta: float) -> float:
    """Limiting free energy at inverse temperature beta and field h.

    With l* frozen blocks (see `temperature_threshold`) and J = J_{l*}:

        p = beta * sum_{l<=l*} [ (x_bar_l q_bar_l)^{1/2} rho(t_l) + h x_bar_l t_l ]
            + (1 - x_J) (log 2 + log cosh(beta h)) + beta^2 (1 - q_J) / 2,

    where t_l is the block-optimal magnetization.  The unfrozen remainder
    contributes its annealed value per spin, which makes p continuous in
    beta across every freezing threshold and reduces to the two-branch
    single-level closed form.
    """
    if beta <= 0.0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    cg = coarse_grain(op, h)
    lstar = temperature_threshold(cg, beta)
    frozen = 0.0
    for l in range(lstar):
        t_l = cg.t_block[l]
        frozen += (math.sqrt(cg.x_bar[l] * cg.q_bar[l]) * rho(t_l)
                   + h * cg.x_bar[l] * t_l)
    J = cg.J[lstar]
    x_J = op.x[J - 1] if J >= 1 else 0.0
    q_J = op.q[J - 1] if J >= 1 else 0.0
    return (beta * frozen
            + (1.0 - x_J) * (LOG2 + log_cosh(beta * h))
            + 0.5 * beta * beta * (1.0 - q_J))


def grem_ground_state(op: OrderParameter, h: float) -> float:
    """Limiting ground state: sum over blocks of (q_bar x_bar)^{1/2} M(tilted h)."""
    cg = coarse_grain(op, h)
    total = 0.0
    for l in range(cg.m):
        total += math.sqrt(cg.q_bar[l] * cg.x_bar[l]) * ground_state_constant(
            h / math.sqrt(cg.theta_bar[l]))
    return total


def rem_free_energy_closed(beta: float, h: float) -> float:
    """Two-branch closed form for the single-level model.

    High temperature (beta <= beta_0 = rho(t_star)):
    log 2 + log cosh(beta h) + beta^2/2; low temperature: beta * M(h).
    The branches agree at beta_0.
    """
    if beta <= 0.0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    ts = t_star(h)
    beta0 = rho(ts)
    if beta <= beta0:
        return LOG2 + log_cosh(beta * h) + 0.5 * beta * beta
    return beta * ground_state_constant(h)


def _rem_p_zero_field(b: float) -> float:
    """Zero-field free energy: b^2/2 + log 2 up to b_c = sqrt(2 log 2), then b*b_c."""
    if b <= SQRT_2LOG2:
        return 0.5 * b * b + LOG2
    return b * SQRT_2LOG2


def _variational_objective(t: float, beta: float, h: float) -> float:
    # t*beta*h + (1 - I(t)/log 2) * p0(beta / sqrt(1 - I(t)/log 2)), with the
    # degenerate |t| -> 1 limit t*beta*h + beta*rho(t)
    frac = 1.0 - cramer_entropy(t).value / LOG2
    if frac <= 0.0:
        return t * beta * h
    if frac < 1e-14:
        return t * beta * h + beta * rho(t)
    return t * beta * h + frac * _rem_p_zero_field(beta / math.sqrt(frac))


def _golden_max(f, lo: float, hi: float, iters: int = 120):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
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
    mid = 0.5 * (a + b)
    return mid, f(mid)


def _variational_objective_grid(t: np.ndarray, beta: float, h: float) -> np.ndarray:
    om, op = 1.0 - t, 1.0 + t
    ival = 0.5 * (np.where(om > 0, om * np.log(np.where(om > 0, om, 1.0)), 0.0)
                  + np.where(op > 0, op * np.log(np.where(op > 0, op, 1.0)), 0.0))
    frac = 1.0 - ival / LOG2
    out = t * beta * h
    pos = frac > 1e-14
    b_eff = beta / np.sqrt(np.where(pos, frac, 1.0))
    p0 = np.where(b_eff <= SQRT_2LOG2, 0.5 * b_eff * b_eff + LOG2, b_eff * SQRT_2LOG2)
    rho_t = np.sqrt(np.maximum(2.0 * (LOG2 - ival), 0.0))
    return out + np.where(pos, frac * p0, beta * rho_t)


def rem_free_energy_variational(beta: float, h: float, grid_size: int = 4096) -> float:
    """Single-level free energy by maximizing the magnetization decomposition.

    Maximizes t*beta*h + (1 - I(t) log2(e)) p0(beta (1 - I(t) log2(e))^{-1/2})
    over t in [-1, 1] by coarse grid plus golden-section refinement.  Agrees
    with `rem_free_energy_closed` to high accuracy for grid_size >= 4096.
    """
    if grid_size < 3:
        raise ValueError(f"grid_size must be >= 3, got {grid_size}")
    if beta <= 0.0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    grid = np.linspace(-1.0, 1.0, grid_size)
    vals = _variational_objective_grid(grid, beta, h)
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_size - 1)]
    _, best = _golden_max(lambda t: _variational_objective(t, beta, h), lo, hi)
    return max(best, float(vals[i]))


def free_energy_curve(op: OrderParameter, h: float, betas) -> FreeEnergyCurve:
    """Evaluate the limiting free energy over an increasing beta grid."""
    bs = [float(b) for b in betas]
    if any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
        raise ValueError("beta grid must be strictly increasing")
    cg = coarse_grain(op, h)
    values = [grem_free_energy(op, h, b) for b in bs]
    levels = [temperature_threshold(cg, b) for b in bs]
    return FreeEnergyCurve(h=h, beta_grid=tuple(bs), values=tuple(values),
                           threshold_levels=tuple(levels))


def _refine_tabulated_min(grid: np.ndarray, vals: np.ndarray) -> TransformValue:
    """Discrete minimum refined by the parabola through the bracketing triple."""
    i = int(np.argmin(vals))
    if i == 0 or i == len(grid) - 1:
        return TransformValue(value=float(vals[i]), arg=float(grid[i]), boundary=True)
    x0, x1, x2 = grid[i - 1], grid[i], grid[i + 1]
    y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
    f01 = (y1 - y0) / (x1 - x0)
    c2 = ((y2 - y1) / (x2 - x1) - f01) / (x2 - x0)
    # only an upward parabola has an interior minimum; otherwise keep the node
    if c2 <= 0.0:
        return TransformValue(value=float(y1), arg=float(x1), boundary=False)
    xv = 0.5 * (x0 + x1) - f01 / (2.0 * c2)
    if not x0 < xv < x2:
        return TransformValue(value=float(y1), arg=float(x1), boundary=False)
    yv = y0 + f01 * (xv - x0) + c2 * (xv - x0) * (xv - x1)
    return TransformValue(value=float(min(yv, y1)), arg=float(xv), boundary=False)


def legendre_restrict(p_of_lambda: TabulatedFunction, q: float) -> TransformValue:
    """Restricted value inf_lambda(-lambda*q + p(lambda)) over the tabulation.

    The infimum over the grid is refined by a local parabolic fit, which is
    exact for quadratic p.  A minimum attained at the grid boundary is
    flagged (`boundary=True`): the constraint lies outside the slope range
    covered by the tabulation.
    """
    g = p_of_lambda.grid
    vals = -g * q + p_of_lambda.values
    if g.size == 1:
        return TransformValue(value=float(vals[0]), arg=float(g[0]), boundary=True)
    return _refine_tabulated_min(g, vals)


def global_from_restricted(restricted: TabulatedFunction) -> TransformValue:
    """Global value sup_q(p_restricted(q) + q) over the tabulated constraint range."""
    g = restricted.grid
    vals = restricted.values + g
    if g.size == 1:
        return TransformValue(value=float(vals[0]), arg=float(g[0]), boundary=True)
    r = _refine_tabulated_min(g, -vals)
    return TransformValue(value=-r.value, arg=r.arg, boundary=r.boundary)
