"""Deterministic closed-loop pointing-trial simulator.

Reproduces the mid-air selection task: a synthetic reacher moves a physical
hand through a curved target grid at a fixed 60 Hz timestep while fatigue,
the intervention controller, and the reach mapping are updated every frame.
Given the same condition, arm length, seed, and starting fatigue, a trial is
bit-for-bit reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Union

from .controller import InterventionParams, InterventionState, controller_step
from .fatigue import (
    ArmAnthropometrics,
    FatigueModelParams,
    FatigueState,
    fatigue_step,
)
from .geometry import ArmPose, Vec3, spherical_point
from .gogo import GoGoParams, gogo_blended_map, gogo_inverse

FRAME_RATE = 60.0
FRAME_DT = 1.0 / FRAME_RATE

GRID_SIDE = 9
GRID_STEP_DEG = 7.5
INCLINATION_MIN_DEG = -30.0
AZIMUTH_MIN_DEG = 60.0

TRIAL_TARGET_COUNT = 40
TRIAL_TIMEOUT_S = 300.0


class TrialTimeout(RuntimeError):
    """Raised when a trial fails to finish within the safety cap."""


@dataclass(frozen=True)
class TargetGrid:
    """The 9 x 9 curved grid of selection targets at one arm length."""

    arm_length: float
    points: tuple[Vec3, ...]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TrialPlan:
    """Seeded target order for one trial."""

    target_indices: tuple[int, ...]
    seed: int
    target_radius: float = 0.025


@dataclass(frozen=True)
class MotionParams:
    """Bounded-velocity pursuit parameters of the synthetic reacher."""

    peak_speed: float = 1.0
    dwell: float = 0.0

    def __post_init__(self) -> None:
        if not self.peak_speed > 0.0:
            raise ValueError("peak_speed must be positive")
        if self.dwell < 0.0:
            raise ValueError("dwell must be >= 0")


@dataclass(frozen=True)
class FixedMapping:
    """Non-adaptive condition: the mapping parameters never move."""

    theta: float
    beta: float


# A trial either runs a fixed mapping or the adaptive controller.
MappingSpec = Union[FixedMapping, InterventionParams]


@dataclass(frozen=True)
class FrameRecord:
    t: float
    p_r: Vec3
    p_v: Vec3
    fatigue: float
    theta: float
    alpha: float
    beta: float


@dataclass
class TrialLog:
    """Per-frame time series plus the trial-level metrics derived from it."""

    frames: list[FrameRecord] = field(default_factory=list)

    @property
    def tct(self) -> float:
        return self.frames[-1].t - self.frames[0].t

    @property
    def mean_offset(self) -> float:
        total = sum(f.p_v.distance_to(f.p_r) for f in self.frames)
        return total / len(self.frames)


def cumulative_fatigue(log: TrialLog) -> float:
    """Mean fatigue over the final second (60 frames) of the trial."""
    if len(log.frames) < int(FRAME_RATE):
        raise ValueError(
            f"log must span at least 1 s ({int(FRAME_RATE)} frames), "
            f"got {len(log.frames)}"
        )
    window = log.frames[-int(FRAME_RATE):]
    return sum(f.fatigue for f in window) / len(window)


def generate_grid(arm_length: float) -> TargetGrid:
    """All 81 grid points, row-major over (inclination, azimuth)."""
    if not arm_length > 0.0:
        raise ValueError("arm_length must be positive")
    points = tuple(
        spherical_point(
            INCLINATION_MIN_DEG + i * GRID_STEP_DEG,
            AZIMUTH_MIN_DEG + j * GRID_STEP_DEG,
            arm_length,
        )
        for i in range(GRID_SIDE)
        for j in range(GRID_SIDE)
    )
    return TargetGrid(arm_length=arm_length, points=points)


def sample_targets(
    grid: TargetGrid,
    n: int = TRIAL_TARGET_COUNT,
    seed: int = 0,
    target_radius: float = 0.025,
) -> TrialPlan:
    """First n indices of a seeded shuffle; the order is fixed per seed."""
    if n > len(grid):
        raise ValueError(f"cannot sample {n} targets from a {len(grid)}-point grid")
    indices = list(range(len(grid)))
    random.Random(seed).shuffle(indices)
    return TrialPlan(
        target_indices=tuple(indices[:n]), seed=seed, target_radius=target_radius
    )


def plan_step(current: Vec3, goal: Vec3, dt: float, motion: MotionParams) -> Vec3:
    """Move toward the goal at bounded speed; exact arrival is allowed."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    offset = goal - current
    distance = offset.norm()
    reach = motion.peak_speed * dt
    if distance <= reach:
        return goal
    return current + offset.scaled(reach / distance)


def _rest_pose(arm_length: float) -> Vec3:
    # Arm hanging straight down in a standing posture.
    return Vec3(0.0, -arm_length, 0.0)


def run_trial(
    mapping: MappingSpec,
    arm_length: float,
    seed: int,
    anthro: ArmAnthropometrics,
    fatigue_params: FatigueModelParams,
    motion: MotionParams = MotionParams(),
    gogo: GoGoParams | None = None,
    initial_fatigue: float = 0.0,
    body_mass: float = 70.0,
    target_radius: float = 0.025,
    n_targets: int = TRIAL_TARGET_COUNT,
) -> TrialLog:
    """Run one full pointing trial and log every frame.

    Per frame: advance fatigue for the pose held since the previous frame,
    tick the controller (or hold the fixed mapping), re-derive the physical
    goal for the current target through the inverse mapping, advance the hand
    at bounded speed, map it to the virtual position, and check selection.
    The trial ends when all targets have been consumed.
    """
    if n_targets < 1:
        raise ValueError("a trial needs at least one target")
    if gogo is None:
        gogo = GoGoParams(arm_length=arm_length)
    grid = generate_grid(arm_length)
    plan = sample_targets(grid, n=n_targets, seed=seed, target_radius=target_radius)

    adaptive = isinstance(mapping, InterventionParams)
    ctrl = InterventionState.initial(mapping) if adaptive else None

    p_r = _rest_pose(arm_length)
    fatigue = FatigueState(fatigue=initial_fatigue, t_last=0.0)
    log = TrialLog()

    target_cursor = 0
    target = grid.points[plan.target_indices[0]]
    target_dir = target.scaled(1.0 / target.norm())
    dwell_time = 0.0

    k = 0
    while True:
        t = k * FRAME_DT
        if t > TRIAL_TIMEOUT_S:
            raise TrialTimeout(
                f"trial did not finish within {TRIAL_TIMEOUT_S:.0f} s "
                f"({target_cursor}/{len(plan.target_indices)} targets consumed)"
            )

        if k > 0:
            pose = ArmPose(hand=p_r, arm_length=arm_length, body_mass=body_mass)
            fatigue = fatigue_step(fatigue, pose, FRAME_DT, anthro, fatigue_params)

        if adaptive:
            ctrl = controller_step(ctrl, fatigue.fatigue, mapping)
            alpha, theta, beta = ctrl.alpha, ctrl.theta, ctrl.beta
        else:
            alpha, theta, beta = 0.0, mapping.theta, mapping.beta

        if k > 0:
            goal_radius = min(
                arm_length, gogo_inverse(target.norm(), theta, beta, gogo)
            )
            goal = target_dir.scaled(goal_radius)
            p_r = plan_step(p_r, goal, FRAME_DT, motion)

        p_v = gogo_blended_map(p_r, theta, beta, gogo)
        log.frames.append(
            FrameRecord(
                t=t, p_r=p_r, p_v=p_v,
                fatigue=fatigue.fatigue, theta=theta, alpha=alpha, beta=beta,
            )
        )

        if p_v.distance_to(target) <= plan.target_radius:
            if dwell_time >= motion.dwell:
                target_cursor += 1
                if target_cursor >= len(plan.target_indices):
                    return log
                target = grid.points[plan.target_indices[target_cursor]]
                target_dir = target.scaled(1.0 / target.norm())
                dwell_time = 0.0
            else:
                dwell_time += FRAME_DT
        else:
            dwell_time = 0.0

        k += 1


def frame_rows(log: TrialLog) -> list[str]:
    """Columnar text rows for the frame log, full float precision."""
    rows = ["t,p_r_x,p_r_y,p_r_z,p_v_x,p_v_y,p_v_z,F,theta,alpha,beta"]
    for f in log.frames:
        rows.append(
            ",".join(
                repr(v)
                for v in (
                    f.t,
                    f.p_r.x, f.p_r.y, f.p_r.z,
                    f.p_v.x, f.p_v.y, f.p_v.z,
                    f.fatigue, f.theta, f.alpha, f.beta,
                )
            )
        )
    return rows


def trial_summary(log: TrialLog) -> dict:
    return {
        "tct": log.tct,
        "cumulative_fatigue": cumulative_fatigue(log),
        "mean_offset": log.mean_offset,
        "frames": len(log.frames),
    }
