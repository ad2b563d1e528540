"""Survival-clearance reward functions and the utilization penalty.

All reward-function time arguments are minutes since injury; the simulator
clock runs in hours and converts at this boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels

MINUTES_PER_HOUR = 60.0


@dataclass(frozen=True)
class SurvivalParams:
    a: float  # Weibull scale, minutes
    gamma_shape: float  # Weibull shape
    m: float  # battlefield clearance slope, per minute

    def __post_init__(self):
        if self.a <= 0 or self.gamma_shape <= 0 or self.m < 0:
            raise ValueError("require a > 0, gamma_shape > 0, m >= 0")


# Named presets for the two request categories.
TRANSFER_PRESET = SurvivalParams(a=125.0, gamma_shape=7.0, m=0.0042)
POINT_OF_INJURY_PRESET = SurvivalParams(a=63.0, gamma_shape=7.0, m=0.0063)


@dataclass(frozen=True)
class PenaltyConfig:
    tau1: float = 0.0
    tau2: float = 0.0

    def __post_init__(self):
        if self.tau1 < 0 or self.tau2 < 0:
            raise ValueError("tau weights must be non-negative")


def fused_reward(params: SurvivalParams, t: float) -> float:
    """max(Weibull survival, linear clearance) at t minutes since injury."""
    if t < 0:
        raise ValueError("time since injury must be non-negative")
    return kernels.fused_reward(t, params.a, params.gamma_shape, params.m)


def greedy_reward(t: float, patients: int) -> float:
    """Transfer reward scaled by the number of patients transported."""
    if patients < 1:
        raise ValueError("patients must be >= 1")
    return fused_reward(TRANSFER_PRESET, t) * patients


def optimal_reward(
    transfer_t: float,
    intermediate: list[tuple[float, int]],
    *,
    multiply_transfer_by_patients: bool = False,
    transfer_patients: int = 1,
) -> float:
    """Transfer reward plus summed point-of-injury rewards between epochs.

    The transfer term carries no patient multiplier by default; set
    multiply_transfer_by_patients for sensitivity runs.
    """
    total = sum(
        fused_reward(POINT_OF_INJURY_PRESET, t_x) * p_x for t_x, p_x in intermediate
    )
    transfer = fused_reward(TRANSFER_PRESET, transfer_t)
    if multiply_transfer_by_patients:
        transfer *= transfer_patients
    return total + transfer


def utilization_penalty(
    cfg: PenaltyConfig, t_h1: float, u1: float, t_h2: float, u2: float
) -> float:
    """Employment-hours penalty weighted by historic utilization."""
    if not (0.0 <= u1 <= 1.0 and 0.0 <= u2 <= 1.0):
        raise ValueError("utilization must lie in [0, 1]")
    return cfg.tau1 * t_h1 * u1 + cfg.tau2 * t_h2 * u2
