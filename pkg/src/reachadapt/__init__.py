"""Fatigue-driven runtime adaptation of hand-redirection techniques.

The package splits into a pure numeric core (geometry, fatigue, controller,
gogo), a deterministic closed-loop pointing simulator, an experiment sweep
harness, and a small real-time WebSocket service for interactive demos.
"""

from .controller import (
    InterventionParams,
    InterventionState,
    alpha_of_fatigue,
    beta_advance,
    blend_positions,
    controller_step,
    theta_of_alpha,
)
from .fatigue import (
    ArmAnthropometrics,
    CalibrationError,
    FatigueModel,
    FatigueModelParams,
    FatigueState,
    TorqueFatigueModel,
    calibrate_gain,
    fatigue_step,
    shoulder_torque,
)
from .geometry import ArmPose, TimedFrame, Vec3, radial_decompose
from .gogo import GoGoParams, gogo_blended_map, gogo_inverse, gogo_map
from .simulator import (
    FixedMapping,
    MotionParams,
    TargetGrid,
    TrialLog,
    TrialTimeout,
    cumulative_fatigue,
    generate_grid,
    plan_step,
    run_trial,
    sample_targets,
)
from .experiment import (
    Condition,
    DegenerateTraining,
    ExperimentConfig,
    all_conditions,
    condition_params,
    non_dominated,
    pareto_front,
    run_sweep,
    run_training,
    summarize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
