"""Real-time shoulder-fatigue estimation.

The controller only needs a scalar fatigue percentage that rises under
exertion and falls at rest, so the estimator here is deliberately simple: a
static gravitational shoulder-torque proxy drives linear accumulation above a
rest threshold and linear recovery below it. It sits behind the small
FatigueModel protocol so a richer biomechanical model can be swapped in
without touching the controller or the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .geometry import ArmPose, TimedFrame

GRAVITY = 9.81  # m/s^2

FATIGUE_MIN = 0.0
FATIGUE_MAX = 100.0


class CalibrationError(RuntimeError):
    """Raised when no accumulation gain can reach the requested fatigue."""


@dataclass(frozen=True)
class FatigueState:
    """Scalar fatigue in percent plus the time it was last advanced to."""

    fatigue: float = 0.0
    t_last: float = 0.0


@dataclass(frozen=True)
class ArmAnthropometrics:
    """Arm segment properties for the gravitational torque proxy.

    com_fraction places the arm's center of mass along the shoulder-to-hand
    line as a fraction of the current reach, so pulling the hand in shortens
    the gravity lever.
    """

    arm_mass: float = 3.5
    com_fraction: float = 0.45
    tau_max: float = 40.0

    def __post_init__(self) -> None:
        if not self.arm_mass > 0.0:
            raise ValueError("arm_mass must be positive")
        if not 0.0 < self.com_fraction < 1.0:
            raise ValueError("com_fraction must be in (0, 1)")
        if not self.tau_max > 0.0:
            raise ValueError("tau_max must be positive")


@dataclass(frozen=True)
class FatigueModelParams:
    """Accumulation gain, recovery rate, and the rest threshold.

    accumulation_gain is percent/s at full relative torque; recovery_rate is
    percent/s whenever relative torque is at or below rest_threshold.
    """

    accumulation_gain: float = 4.0
    recovery_rate: float = 0.1
    rest_threshold: float = 0.05

    def __post_init__(self) -> None:
        if not self.accumulation_gain > 0.0:
            raise ValueError("accumulation_gain must be positive")
        if self.recovery_rate < 0.0:
            raise ValueError("recovery_rate must be >= 0")
        if not 0.0 <= self.rest_threshold < 1.0:
            raise ValueError("rest_threshold must be in [0, 1)")


def shoulder_torque(pose: ArmPose, anthro: ArmAnthropometrics) -> float:
    """Static gravitational torque about the shoulder, in N*m.

    The arm's center of mass sits at com_fraction of the way to the hand;
    only its horizontal offset from the shoulder resists gravity, so an arm
    hanging straight down produces zero torque.
    """
    lever = anthro.com_fraction * pose.hand.horizontal_radius()
    return anthro.arm_mass * GRAVITY * lever


def relative_torque(pose: ArmPose, anthro: ArmAnthropometrics) -> float:
    """Shoulder torque normalized by the voluntary maximum, clamped to [0, 1]."""
    rho = shoulder_torque(pose, anthro) / anthro.tau_max
    return min(1.0, max(0.0, rho))


def fatigue_step(
    state: FatigueState,
    pose: ArmPose,
    dt: float,
    anthro: ArmAnthropometrics,
    params: FatigueModelParams,
) -> FatigueState:
    """Advance fatigue by dt seconds of holding the given pose.

    Above the rest threshold fatigue accumulates proportionally to relative
    torque; at or below it, it recovers at a constant rate. The result stays
    in [0, 100].
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    rho = relative_torque(pose, anthro)
    if rho > params.rest_threshold:
        fatigue = state.fatigue + params.accumulation_gain * rho * dt
    else:
        fatigue = state.fatigue - params.recovery_rate * dt
    fatigue = min(FATIGUE_MAX, max(FATIGUE_MIN, fatigue))
    return FatigueState(fatigue=fatigue, t_last=state.t_last + dt)


class FatigueModel(Protocol):
    """Anything that can advance a fatigue state from a pose over dt."""

    def update(self, state: FatigueState, pose: ArmPose, dt: float) -> FatigueState: ...


@dataclass(frozen=True)
class TorqueFatigueModel:
    """The built-in torque-accumulation/recovery model as a FatigueModel."""

    anthro: ArmAnthropometrics = ArmAnthropometrics()
    params: FatigueModelParams = FatigueModelParams()

    def update(self, state: FatigueState, pose: ArmPose, dt: float) -> FatigueState:
        return fatigue_step(state, pose, dt, self.anthro, self.params)


def replay_final_fatigue(
    trajectory: Sequence[TimedFrame],
    gain: float,
    anthro: ArmAnthropometrics,
    params: FatigueModelParams,
    initial_fatigue: float = 0.0,
) -> float:
    """Final fatigue after replaying a pose trajectory with the given gain."""
    trial = FatigueModelParams(
        accumulation_gain=gain,
        recovery_rate=params.recovery_rate,
        rest_threshold=params.rest_threshold,
    )
    state = FatigueState(fatigue=initial_fatigue, t_last=trajectory[0].t)
    prev = trajectory[0]
    # Zero-order hold: each interval is charged at the pose held since the
    # previous frame, matching the closed-loop simulator's stepping order.
    for frame in trajectory[1:]:
        dt = frame.t - prev.t
        if dt > 0.0:
            state = fatigue_step(state, prev.pose, dt, anthro, trial)
        prev = frame
    return state.fatigue


def calibrate_gain(
    trajectory: Sequence[TimedFrame],
    target_fatigue: float,
    anthro: ArmAnthropometrics,
    params: FatigueModelParams,
    tolerance: float = 1e-9,
) -> float:
    """Accumulation gain for which replaying the trajectory ends at target_fatigue.

    Final fatigue is monotone non-decreasing in the gain, so a bracketed
    bisection suffices. Raises CalibrationError when the target cannot be
    reached, e.g. a trajectory that never leaves the rest regime.
    """
    if len(trajectory) < 2:
        raise ValueError("trajectory must contain at least two frames")
    span = trajectory[-1].t - trajectory[0].t
    if span < 10.0:
        raise ValueError(f"trajectory must span at least 10 s, got {span:.2f} s")
    if not FATIGUE_MIN < target_fatigue < FATIGUE_MAX:
        raise ValueError("target fatigue must be strictly inside (0, 100)")

    def final(gain: float) -> float:
        return replay_final_fatigue(trajectory, gain, anthro, params)

    lo, hi = 0.0, 1.0
    while final(hi) < target_fatigue:
        hi *= 2.0
        if hi > 1e9:
            raise CalibrationError(
                "target fatigue unreachable: trajectory accumulates too little "
                "under any gain (is it entirely at rest?)"
            )
    # Bisect the gain bracket far below the fatigue tolerance; sensitivity of
    # the final fatigue to the gain is bounded by the trajectory duration.
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if final(mid) < target_fatigue:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def peak_fatigue(fatigue_series: Iterable[float]) -> float:
    """Maximum fatigue over a trial; the per-subject reference F_max."""
    return max(fatigue_series)
