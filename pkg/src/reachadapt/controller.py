"""Fatigue-to-intervention controller.

Maps a live fatigue percentage to an intervention scalar alpha through a
thresholded exponential response, interpolates the technique parameter theta
between its default and maximum-intervention bounds, and ramps a one-shot
smoothing factor beta after the first threshold crossing so the remapped
position fades in instead of jumping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import Vec3

DEFAULT_BETA_STEP = 0.005  # per 60 Hz frame; 200 frames = 3.33 s fade-in


@dataclass(frozen=True)
class InterventionParams:
    """Meta-parameters of the adaptive controller.

    fatigue_threshold is in fatigue percent; decay_rate shapes how sharply
    alpha responds to fatigue in excess of the threshold. theta_0 is the
    untouched technique parameter, theta_1 the maximum-intervention value.
    beta_step defaults to 0.005, sized for a 60 Hz loop; rescale it if the
    caller ticks at another rate and wants to keep the 3.33 s transition.
    """

    fatigue_threshold: float
    decay_rate: float
    theta_0: float
    theta_1: float
    beta_step: float = DEFAULT_BETA_STEP

    def __post_init__(self) -> None:
        if self.fatigue_threshold < 0.0:
            raise ValueError("fatigue_threshold must be >= 0")
        if not self.decay_rate > 0.0:
            raise ValueError("decay_rate must be > 0")
        if self.theta_0 == self.theta_1:
            raise ValueError("theta_0 and theta_1 must differ")
        if not 0.0 < self.beta_step <= 1.0:
            raise ValueError("beta_step must be in (0, 1]")


@dataclass(frozen=True)
class InterventionState:
    """Live controller scalars for one session."""

    alpha: float = 0.0
    beta: float = 0.0
    theta: float = 0.0
    onset_triggered: bool = False

    @staticmethod
    def initial(params: InterventionParams) -> "InterventionState":
        return InterventionState(alpha=0.0, beta=0.0, theta=params.theta_0)


def alpha_of_fatigue(fatigue: float, params: InterventionParams) -> float:
    """Intervention scalar in [0, 1) for the given fatigue percent.

    Zero below the threshold, rising as 1 - exp(-decay_rate * excess) at and
    above it; continuous at the threshold where the excess is zero.
    """
    if fatigue < params.fatigue_threshold:
        return 0.0
    return 1.0 - math.exp(-params.decay_rate * (fatigue - params.fatigue_threshold))


def theta_of_alpha(alpha: float, params: InterventionParams) -> float:
    """Interpolate the technique parameter between its bounds.

    Computed as (1-alpha)*theta_0 + alpha*theta_1 so both endpoints are hit
    exactly in floating point, then clamped to the bound interval.
    """
    theta = (1.0 - alpha) * params.theta_0 + alpha * params.theta_1
    lo = min(params.theta_0, params.theta_1)
    hi = max(params.theta_0, params.theta_1)
    return min(hi, max(lo, theta))


def beta_advance(
    state: InterventionState, fatigue: float, params: InterventionParams
) -> InterventionState:
    """Advance the smoothing ramp by one tick.

    The first tick with fatigue at or above the threshold latches the onset;
    once latched, beta grows by beta_step per tick and clamps at 1. The latch
    never releases, so beta is monotone even if fatigue later recovers.
    """
    triggered = state.onset_triggered or fatigue >= params.fatigue_threshold
    if not triggered:
        return replace(state, beta=0.0, onset_triggered=False)
    return replace(
        state,
        beta=min(1.0, state.beta + params.beta_step),
        onset_triggered=True,
    )


def blend_positions(p_base: Vec3, p_manip: Vec3, beta: float) -> Vec3:
    """Componentwise interpolation from the base to the manipulated position.

    Written as (1-beta)*base + beta*manip so beta 0 and 1 return the inputs
    bit-exactly.
    """
    w = 1.0 - beta
    return Vec3(
        w * p_base.x + beta * p_manip.x,
        w * p_base.y + beta * p_manip.y,
        w * p_base.z + beta * p_manip.z,
    )


def controller_step(
    state: InterventionState, fatigue: float, params: InterventionParams
) -> InterventionState:
    """One controller tick: refresh alpha and theta, advance the beta ramp.

    alpha and theta track the instantaneous fatigue bidirectionally (they
    relax back toward the defaults if fatigue recovers); only the beta ramp
    is one-shot.
    """
    alpha = alpha_of_fatigue(fatigue, params)
    theta = theta_of_alpha(alpha, params)
    advanced = beta_advance(state, fatigue, params)
    return replace(advanced, alpha=alpha, theta=theta)
