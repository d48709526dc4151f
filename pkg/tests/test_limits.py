import math

import numpy as np
import pytest

from gremlab.hierarchy import validate_order_parameter
from gremlab.limits import (
    TabulatedFunction,
    free_energy_curve,
    global_from_restricted,
    grem_free_energy,
    grem_ground_state,
    legendre_restrict,
    log_cosh,
    rem_free_energy_closed,
    rem_free_energy_variational,
)
from gremlab.scalars import SQRT_2LOG2, cramer_entropy, ground_state_constant, rho, t_star

import oracles

REM = validate_order_parameter([1.0], [1.0])
CONCAVE2 = validate_order_parameter([0.5, 1.0], [0.75, 1.0])
CONVEX2 = validate_order_parameter([0.5, 1.0], [0.25, 1.0])
LOG2 = math.log(2.0)


def test_log_cosh_stable():
    assert log_cosh(0.0) == 0.0
    assert log_cosh(1e3) == pytest.approx(1e3 - LOG2, rel=1e-14)
    assert log_cosh(0.37) == pytest.approx(math.log(math.cosh(0.37)), rel=1e-14)


def test_rem_closed_known_branches():
    # zero-field branches
    assert rem_free_energy_closed(1.0, 0.0) == pytest.approx(0.5 + LOG2, rel=1e-14)
    assert rem_free_energy_closed(3.0, 0.0) == pytest.approx(3 * SQRT_2LOG2, rel=1e-14)
    # with field: low temperature is beta * M(h), high temperature is annealed
    assert rem_free_energy_closed(3.0, 0.5) == pytest.approx(
        3.0 * ground_state_constant(0.5), rel=1e-13)
    assert rem_free_energy_closed(0.5, 0.5) == pytest.approx(
        LOG2 + log_cosh(0.25) + 0.125, rel=1e-13)


def test_rem_closed_branch_continuity():
    for h in np.linspace(0.0, 3.0, 16):
        b0 = rho(t_star(h))
        lo = rem_free_energy_closed(b0 * (1 - 1e-13), h)
        hi = rem_free_energy_closed(b0 * (1 + 1e-13), h)
        assert abs(lo - hi) <= 1e-12


def test_grem_free_energy_rem_reduction():
    for beta in (0.3, 0.9, 1.4, 2.5):
        for h in (0.0, 0.5, 1.5):
            assert grem_free_energy(REM, h, beta) == pytest.approx(
                rem_free_energy_closed(beta, h), rel=1e-13)


def test_grem_free_energy_two_level_frozen():
    # both levels frozen at large beta: classic frozen-phase slope
    want = math.sqrt(2 * LOG2 * 0.75 * 0.5) + math.sqrt(2 * LOG2 * 0.25 * 0.5)
    for beta in (5.0, 9.0):
        assert grem_free_energy(CONCAVE2, 0.0, beta) == pytest.approx(beta * want, rel=1e-12)
    # merged profile behaves like a single level
    assert grem_free_energy(CONVEX2, 0.0, 9.0) == pytest.approx(
        rem_free_energy_closed(9.0, 0.0), rel=1e-12)


def test_grem_free_energy_middle_phase_value():
    # one frozen block: frozen part + annealed remainder, h = 0
    cg_gamma = 1.5 / (2 * LOG2)
    beta = 1.3
    assert 1.0 / math.sqrt(cg_gamma) < beta < 1.0 / math.sqrt(0.5 / (2 * LOG2))
    want = beta * math.sqrt(2 * LOG2 * 0.75 * 0.5) + 0.5 * (LOG2 + 0.0) + 0.5 * beta**2 * 0.25
    assert grem_free_energy(CONCAVE2, 0.0, beta) == pytest.approx(want, rel=1e-12)


def test_free_energy_continuity_and_convexity_in_beta():
    betas = np.linspace(0.05, 6.0, 1200)
    for op in (REM, CONCAVE2, CONVEX2):
        for h in (0.0, 0.5, 2.0):
            curve = free_energy_curve(op, h, betas)
            v = np.asarray(curve.values)
            assert np.diff(v, 2).min() >= -1e-10  # convex
            jumps = np.abs(np.diff(v))
            assert jumps.max() <= 0.05  # continuous across threshold changes
            assert max(curve.threshold_levels) <= op.n


def test_free_energy_monotone_in_field():
    betas = [0.5, 1.5, 3.0]
    for op in (REM, CONCAVE2):
        for beta in betas:
            vals = [grem_free_energy(op, h, beta) for h in np.linspace(0, 2.5, 12)]
            assert all(v2 >= v1 - 1e-12 for v1, v2 in zip(vals, vals[1:]))


def test_ground_state_values():
    assert grem_ground_state(REM, 0.5) == pytest.approx(ground_state_constant(0.5), rel=1e-13)
    want = math.sqrt(2 * LOG2 * 0.75 * 0.5) + math.sqrt(2 * LOG2 * 0.25 * 0.5)
    assert grem_ground_state(CONCAVE2, 0.0) == pytest.approx(want, rel=1e-13)
    assert grem_ground_state(CONVEX2, 0.0) == pytest.approx(SQRT_2LOG2, rel=1e-13)


def test_free_energy_slope_approaches_ground_state():
    rng = np.random.default_rng(5)
    beta = 1e3
    for _ in range(20):
        x, q = oracles.random_order_parameter(rng)
        op = validate_order_parameter(x, q)
        for h in (0.0, 0.8):
            gs = grem_ground_state(op, h)
            assert abs(grem_free_energy(op, h, beta) / beta - gs) / gs <= 1e-3


def test_variational_matches_closed_form():
    for beta in np.linspace(0.1, 4.0, 14):
        for h in np.linspace(0.0, 2.0, 8):
            got = rem_free_energy_variational(beta, h)
            want = rem_free_energy_closed(beta, h)
            assert abs(got - want) <= 1e-8
    with pytest.raises(ValueError):
        rem_free_energy_variational(1.0, 0.5, grid_size=2)


def test_variational_against_dense_grid_oracle():
    for beta, h in ((0.5, 0.5), (3.0, 0.5), (1.2, 1.7)):
        got = rem_free_energy_variational(beta, h)
        assert got == pytest.approx(oracles.variational_dense_oracle(beta, h), abs=2e-8)


def test_legendre_quadratic_conjugate():
    grid = np.linspace(-4.0, 4.0, 2001)
    tab = TabulatedFunction(grid=grid, values=0.5 * grid**2)
    for q in (-1.3, 0.0, 0.7, 2.2):
        r = legendre_restrict(tab, q)
        assert not r.boundary
        assert r.value == pytest.approx(-0.5 * q * q, abs=1e-12)
        assert r.arg == pytest.approx(q, abs=1e-6)


def test_legendre_boundary_flagged():
    grid = np.linspace(-1.0, 1.0, 101)
    tab = TabulatedFunction(grid=grid, values=0.5 * grid**2)
    assert legendre_restrict(tab, 5.0).boundary  # constraint outside slope range


def test_legendre_rem_restricted_free_energy():
    # restricted value at magnetization t equals the volume-rescaled
    # zero-field free energy; lambda tabulates the tilted full free energy
    beta = 1.2
    lam = np.linspace(-6.0, 6.0, 24001)
    p_lam = np.array([rem_free_energy_closed(beta, abs(l) / beta) for l in lam])
    tab = TabulatedFunction(grid=lam, values=p_lam)
    for t in (0.0, 0.2, 0.45, 0.7):
        frac = 1.0 - cramer_entropy(t).value / LOG2
        b_eff = beta / math.sqrt(frac)
        p0 = 0.5 * b_eff**2 + LOG2 if b_eff <= SQRT_2LOG2 else b_eff * SQRT_2LOG2
        want = frac * p0
        got = legendre_restrict(tab, t)
        assert not got.boundary
        assert got.value == pytest.approx(want, abs=5e-6)


def test_restrict_then_globalize_roundtrip():
    # sup_t(restricted(t) + t*beta*h) recovers the full free energy
    beta, h = 1.2, 0.5
    lam = np.linspace(-6.0, 6.0, 24001)
    tab = TabulatedFunction(grid=lam, values=np.array(
        [rem_free_energy_closed(beta, abs(l) / beta) for l in lam]))
    ts = np.linspace(-0.999, 0.999, 4001)
    restricted = np.array([legendre_restrict(tab, t).value for t in ts])
    glob = global_from_restricted(TabulatedFunction(grid=beta * h * ts, values=restricted))
    assert glob.value == pytest.approx(rem_free_energy_closed(beta, h), abs=1e-6)


def test_global_from_restricted_trivia():
    grid = np.linspace(-1.0, 1.0, 11)
    const = TabulatedFunction(grid=grid, values=np.full(11, 2.5))
    g = global_from_restricted(const)
    assert g.value == pytest.approx(2.5 + 1.0, rel=1e-14)
    assert g.boundary
    single = TabulatedFunction(grid=np.array([0.3]), values=np.array([1.1]))
    s = global_from_restricted(single)
    assert s.value == pytest.approx(1.4, rel=1e-14) and s.boundary
    with pytest.raises(ValueError):
        TabulatedFunction(grid=np.array([]), values=np.array([]))
