import math

import numpy as np
import pytest

from gremlab.hierarchy import (
    coarse_grain,
    grem_rescale,
    grem_scaling,
    modified_slope,
    rebuild_from_blocks,
    slope,
    temperature_threshold,
    validate_order_parameter,
)
from gremlab.scalars import SQRT_2LOG2, rem_scaling, rho, t_star

import oracles

REM = validate_order_parameter([1.0], [1.0])
CONCAVE2 = validate_order_parameter([0.5, 1.0], [0.75, 1.0])
CONVEX2 = validate_order_parameter([0.5, 1.0], [0.25, 1.0])


def test_validation_accepts_and_rejects():
    assert REM.n == 1
    assert CONCAVE2.n == 2
    with pytest.raises(ValueError):
        validate_order_parameter([0.5, 1.0], [1.0, 0.5])
    with pytest.raises(ValueError):
        validate_order_parameter([1.0, 0.5], [0.5, 1.0])
    with pytest.raises(ValueError):
        validate_order_parameter([], [])
    with pytest.raises(ValueError):
        validate_order_parameter([0.5, 0.9], [0.2, 1.0])
    with pytest.raises(ValueError):
        validate_order_parameter([0.5], [0.3, 1.0])


def test_level_variances():
    assert CONCAVE2.a == pytest.approx((math.sqrt(0.75), math.sqrt(0.25)))


def test_slope_hand_values():
    assert slope(CONCAVE2, 1, 1) == pytest.approx(1.5)
    assert slope(CONCAVE2, 2, 2) == pytest.approx(0.5)
    assert slope(CONCAVE2, 1, 2) == pytest.approx(1.0)
    assert slope(REM, 1, 1) == pytest.approx(1.0)
    with pytest.raises(IndexError):
        slope(CONCAVE2, 2, 1)
    with pytest.raises(IndexError):
        slope(CONCAVE2, 0, 1)


def test_full_chord_slope_is_one():
    rng = np.random.default_rng(7)
    for _ in range(20):
        x, q = oracles.random_order_parameter(rng)
        op = validate_order_parameter(x, q)
        assert slope(op, 1, op.n) == pytest.approx(1.0, rel=1e-12)


def test_modified_slope_zero_field():
    # at h = 0 the modification divides by 2 log 2
    assert modified_slope(CONCAVE2, 1, 1, 0.0) == pytest.approx(1.5 / (2 * math.log(2)), rel=1e-14)
    assert modified_slope(REM, 1, 1, 0.0) == pytest.approx(1 / (2 * math.log(2)), rel=1e-14)


def test_modified_slope_with_field_matches_oracle():
    # frozen via the independent root-finder at h = 0.5
    assert modified_slope(CONCAVE2, 1, 1, 0.5) == pytest.approx(1.2457498773743745, rel=1e-11)
    assert modified_slope(CONCAVE2, 2, 2, 0.5) == pytest.approx(0.5044491333022231, rel=1e-11)
    assert modified_slope(CONCAVE2, 1, 2, 0.5) == pytest.approx(0.8789290296047746, rel=1e-11)


def test_coarse_grain_rem():
    for h in (0.0, 0.5, 2.0):
        cg = coarse_grain(REM, h)
        assert cg.J == (0, 1) and cg.m == 1
        assert cg.gamma_bar[0] == pytest.approx(1.0 / rho(t_star(h)), rel=1e-12)
        assert cg.q_bar == (1.0,) and cg.x_bar == (1.0,) and cg.theta_bar == (1.0,)


def test_coarse_grain_two_level_cases():
    kept = coarse_grain(CONCAVE2, 0.0)
    assert kept.J == (0, 1, 2) and kept.m == 2 and not kept.critical
    merged = coarse_grain(CONVEX2, 0.0)
    assert merged.J == (0, 2) and merged.m == 1 and not merged.critical
    assert merged.gamma_bar[0] == pytest.approx(1.0 / SQRT_2LOG2, rel=1e-12)


def test_coarse_grain_critical_tie_flagged():
    # the diagonal profile makes every modified slope equal at h = 0
    diag = validate_order_parameter([0.5, 1.0], [0.5, 1.0])
    cg = coarse_grain(diag, 0.0)
    assert cg.critical
    assert cg.J == (0, 1, 2)


def test_block_identities_and_gamma_decreasing_random():
    rng = np.random.default_rng(42)
    for _ in range(500):
        x, q = oracles.random_order_parameter(rng)
        op = validate_order_parameter(x, q)
        for h in (0.0, 0.5, 2.0):
            cg = coarse_grain(op, h)
            assert abs(sum(cg.q_bar) - 1.0) <= 1e-12
            assert abs(sum(cg.x_bar) - 1.0) <= 1e-12
            assert all(g1 > g2 for g1, g2 in zip(cg.gamma_bar, cg.gamma_bar[1:]))
            assert cg.J[-1] == op.n and cg.m <= op.n


def test_coarse_grain_matches_concave_hull_at_zero_field():
    rng = np.random.default_rng(11)
    for _ in range(300):
        x, q = oracles.random_order_parameter(rng)
        op = validate_order_parameter(x, q)
        cg = coarse_grain(op, 0.0)
        hull = oracles.upper_concave_hull_indices(op.x, op.q)
        assert list(cg.J) == hull


def test_coarse_grain_idempotent():
    rng = np.random.default_rng(3)
    for _ in range(100):
        x, q = oracles.random_order_parameter(rng)
        op = validate_order_parameter(x, q)
        for h in (0.0, 0.7):
            cg = coarse_grain(op, h)
            again = coarse_grain(rebuild_from_blocks(cg), h)
            assert again.m == cg.m
            assert np.allclose(again.gamma_bar, cg.gamma_bar, rtol=1e-12)


def test_temperature_threshold():
    cg = coarse_grain(REM, 0.0)
    assert temperature_threshold(cg, 1e-6) == 0
    assert temperature_threshold(cg, SQRT_2LOG2 * 0.999) == 0
    assert temperature_threshold(cg, SQRT_2LOG2 * 1.001) == 1
    cg2 = coarse_grain(CONCAVE2, 0.0)
    assert temperature_threshold(cg2, 1.0 / cg2.gamma_bar[-1] + 1e-9) == cg2.m
    bs = np.linspace(0.1, 5.0, 60)
    levels = [temperature_threshold(cg2, b) for b in bs]
    assert all(l2 >= l1 for l1, l2 in zip(levels, levels[1:]))
    with pytest.raises(ValueError):
        temperature_threshold(cg, 0.0)


def test_grem_scaling_rem_reduction():
    for h in (0.0, 0.5):
        gs = grem_scaling(REM, h, 64)
        assert gs.shift == pytest.approx(rem_scaling(64, h).B, rel=1e-14)
        assert gs.block_sizes == (64,)
        assert gs.exact_sizes


def test_grem_scaling_two_level_shift_limit():
    # shift/sqrt(N) approaches the h=0 frozen block sum as N grows
    want = math.sqrt(2 * math.log(2) * 0.75 * 0.5) + math.sqrt(2 * math.log(2) * 0.25 * 0.5)
    gaps = []
    for N in (32, 128, 512, 4096):
        gs = grem_scaling(CONCAVE2, 0.0, N)
        gaps.append(abs(gs.shift / math.sqrt(N) - want))
    assert gaps[-1] < 0.05 and gaps[-1] < gaps[0] / 5


def test_grem_rescale_roundtrip_and_rounding_record():
    gs = grem_scaling(CONCAVE2, 0.5, 24)
    assert grem_rescale(grem_rescale(2.5, gs), gs, "inverse") == pytest.approx(2.5, abs=1e-12)
    assert gs.exact_sizes
    odd = grem_scaling(CONCAVE2, 0.5, 25)  # 12.5 spins per block rounds
    assert not odd.exact_sizes


def test_coarse_grain_bruteforce_agrees():
    rng = np.random.default_rng(2024)
    for _ in range(120):
        x, q = oracles.random_order_parameter(rng)
        op = validate_order_parameter(x, q)
        for h in (0.0, 0.5, 2.0):
            cg = coarse_grain(op, h)
            J, crit = oracles.coarse_grain_bruteforce(op.x, op.q, h)
            assert list(cg.J) == J
            assert cg.critical == crit
