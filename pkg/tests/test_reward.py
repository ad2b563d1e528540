import math

import pytest
from hypothesis import given, strategies as st

from medevacsim.reward import (
    POINT_OF_INJURY_PRESET,
    TRANSFER_PRESET,
    PenaltyConfig,
    SurvivalParams,
    fused_reward,
    greedy_reward,
    optimal_reward,
    utilization_penalty,
)


def test_fused_reward_at_zero_is_one():
    assert fused_reward(TRANSFER_PRESET, 0.0) == pytest.approx(1.0)
    assert fused_reward(POINT_OF_INJURY_PRESET, 0.0) == pytest.approx(1.0)


def test_transfer_anchor_90_minutes():
    # independent recomputation of the Weibull branch
    expected = math.exp(-((90.0 / 125.0) ** 7.0))
    value = fused_reward(TRANSFER_PRESET, 90.0)
    assert value == pytest.approx(expected, abs=1e-12)
    assert abs(value - 0.9046) < 0.0005


def test_transfer_anchor_120_minutes_linear_branch():
    weibull = math.exp(-((120.0 / 125.0) ** 7.0))
    linear = -0.0042 * 120.0 + 1.0
    assert linear > weibull  # the clearance ramp dominates here
    value = fused_reward(TRANSFER_PRESET, 120.0)
    assert value == pytest.approx(linear, abs=1e-12)
    assert abs(value - 0.4960) < 0.0005


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        fused_reward(TRANSFER_PRESET, -1.0)


def test_bad_params_rejected():
    with pytest.raises(ValueError):
        SurvivalParams(a=0.0, gamma_shape=7.0, m=0.0)
    with pytest.raises(ValueError):
        SurvivalParams(a=125.0, gamma_shape=-1.0, m=0.0)
    with pytest.raises(ValueError):
        SurvivalParams(a=125.0, gamma_shape=7.0, m=-0.1)


@given(st.floats(min_value=0.0, max_value=1e4))
def test_fused_reward_bounded_above_by_one(t):
    assert fused_reward(TRANSFER_PRESET, t) <= 1.0 + 1e-12


@given(st.floats(min_value=0.0, max_value=1e4), st.floats(min_value=0.0, max_value=1e4))
def test_fused_reward_monotone_nonincreasing(t1, t2):
    lo, hi = sorted((t1, t2))
    assert fused_reward(TRANSFER_PRESET, lo) >= fused_reward(TRANSFER_PRESET, hi) - 1e-12


@given(st.floats(min_value=0.0, max_value=500.0))
def test_fused_reward_is_max_of_branches(t):
    weibull = math.exp(-((t / 125.0) ** 7.0))
    linear = -0.0042 * t + 1.0
    assert fused_reward(TRANSFER_PRESET, t) == pytest.approx(max(weibull, linear))


def test_greedy_reward_scales_with_patients():
    base = fused_reward(TRANSFER_PRESET, 45.0)
    assert greedy_reward(45.0, 4) == pytest.approx(4 * base)
    with pytest.raises(ValueError):
        greedy_reward(45.0, 0)


def test_optimal_reward_transfer_term_has_no_patient_multiplier():
    plain = optimal_reward(90.0, [(30.0, 2)])
    scaled = optimal_reward(90.0, [(30.0, 2)], multiply_transfer_by_patients=True, transfer_patients=5)
    poi_part = fused_reward(POINT_OF_INJURY_PRESET, 30.0) * 2
    assert plain == pytest.approx(poi_part + fused_reward(TRANSFER_PRESET, 90.0))
    assert scaled == pytest.approx(poi_part + 5 * fused_reward(TRANSFER_PRESET, 90.0))


def test_utilization_penalty():
    cfg = PenaltyConfig(tau1=0.5, tau2=0.25)
    assert utilization_penalty(cfg, 2.0, 0.5, 4.0, 0.75) == pytest.approx(
        0.5 * 2.0 * 0.5 + 0.25 * 4.0 * 0.75
    )
    assert utilization_penalty(PenaltyConfig(), 2.0, 1.0, 4.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        utilization_penalty(cfg, 1.0, 1.5, 1.0, 0.0)
