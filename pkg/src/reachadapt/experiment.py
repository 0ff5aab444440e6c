"""Eleven-condition sweep harness with summary trends and Pareto extraction.

Conditions: one identity baseline, one fixed reach-extension baseline, and a
3 x 3 grid of adaptive conditions crossing intervention timing (threshold as
a fraction of the subject's reference peak fatigue) with decay rate. Every
synthetic subject runs all conditions on the same seed so target orders are
directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .controller import DEFAULT_BETA_STEP, InterventionParams
from .fatigue import ArmAnthropometrics, FatigueModelParams, peak_fatigue
from .gogo import GoGoParams
from .simulator import FixedMapping, MappingSpec, MotionParams, TrialLog, run_trial, trial_summary

THETA_DEFAULT = 1.0
THETA_MAX_INTERVENTION = 1.0 / 6.0
GOGO_FIXED_THETA = 2.0 / 3.0

TIMING_LEVELS = {"start": 0.0, "quarter": 0.25, "mid": 0.5}
DECAY_LEVELS = {"low": 0.1, "medium": 0.25, "high": 0.45}

SUBJECT_ARM_LENGTHS = (0.55, 0.60, 0.65)
SUBJECT_PEAK_SPEEDS = (0.8, 1.0, 1.2)


class DegenerateTraining(RuntimeError):
    """Raised when training produced no usable reference peak fatigue."""


@dataclass(frozen=True)
class Condition:
    kind: str  # "default" | "gogo" | "alphapig"
    timing: str | None = None
    decay: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("default", "gogo", "alphapig"):
            raise ValueError(f"unknown condition kind {self.kind!r}")
        if self.kind == "alphapig":
            if self.timing not in TIMING_LEVELS:
                raise ValueError(f"unknown timing level {self.timing!r}")
            if self.decay not in DECAY_LEVELS:
                raise ValueError(f"unknown decay level {self.decay!r}")
        elif self.timing is not None or self.decay is not None:
            raise ValueError(f"{self.kind} takes no timing/decay levels")

    @property
    def name(self) -> str:
        if self.kind == "alphapig":
            return f"alphapig-{self.timing}-{self.decay}"
        return self.kind


def all_conditions() -> list[Condition]:
    """The 11 study conditions in canonical enumeration order."""
    conditions = [Condition("default"), Condition("gogo")]
    for timing in TIMING_LEVELS:
        for decay in DECAY_LEVELS:
            conditions.append(Condition("alphapig", timing=timing, decay=decay))
    return conditions


def condition_params(
    condition: Condition,
    f_max: float,
    beta_step: float = DEFAULT_BETA_STEP,
) -> MappingSpec:
    """Mapping specification for one condition.

    Adaptive conditions scale their fatigue threshold off the subject's
    reference peak fatigue, so a degenerate (zero) reference is an error: it
    would collapse the three timing levels into one.
    """
    if condition.kind == "default":
        return FixedMapping(theta=THETA_DEFAULT, beta=0.0)
    if condition.kind == "gogo":
        return FixedMapping(theta=GOGO_FIXED_THETA, beta=1.0)
    if not f_max > 0.0:
        raise DegenerateTraining(
            f"reference peak fatigue must be positive for adaptive conditions, "
            f"got {f_max}"
        )
    return InterventionParams(
        fatigue_threshold=TIMING_LEVELS[condition.timing] * f_max,
        decay_rate=DECAY_LEVELS[condition.decay],
        theta_0=THETA_DEFAULT,
        theta_1=THETA_MAX_INTERVENTION,
        beta_step=beta_step,
    )


@dataclass(frozen=True)
class SubjectSpec:
    index: int
    arm_length: float
    peak_speed: float
    seed: int


@dataclass
class ExperimentConfig:
    anthro: ArmAnthropometrics = ArmAnthropometrics()
    fatigue_params: FatigueModelParams = FatigueModelParams()
    base_seed: int = 7
    arm_lengths: tuple[float, ...] = SUBJECT_ARM_LENGTHS
    peak_speeds: tuple[float, ...] = SUBJECT_PEAK_SPEEDS
    dwell: float = 0.0
    target_radius: float = 0.025
    beta_step: float = DEFAULT_BETA_STEP
    gogo_k: float = 1.0 / 12.0
    body_mass: float = 70.0
    initial_fatigue: float = 0.0

    def subjects(self) -> list[SubjectSpec]:
        specs = []
        for arm_length in self.arm_lengths:
            for peak_speed in self.peak_speeds:
                index = len(specs)
                specs.append(
                    SubjectSpec(
                        index=index,
                        arm_length=arm_length,
                        peak_speed=peak_speed,
                        seed=self.base_seed + index,
                    )
                )
        return specs


@dataclass(frozen=True)
class SweepRow:
    condition: str
    timing: str
    decay: str
    subject: int
    seed: int
    cumulative_fatigue: float
    tct: float
    mean_offset: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    f_max_by_subject: dict[int, float] = field(default_factory=dict)
    # Subject-0 logs per condition, kept for trajectory exports.
    example_logs: dict[str, TrialLog] = field(default_factory=dict)


def run_condition_trial(
    condition: Condition, subject: SubjectSpec, config: ExperimentConfig, f_max: float
) -> TrialLog:
    mapping = condition_params(condition, f_max, beta_step=config.beta_step)
    return run_trial(
        mapping,
        arm_length=subject.arm_length,
        seed=subject.seed,
        anthro=config.anthro,
        fatigue_params=config.fatigue_params,
        motion=MotionParams(peak_speed=subject.peak_speed, dwell=config.dwell),
        gogo=GoGoParams(k=config.gogo_k, arm_length=subject.arm_length),
        initial_fatigue=config.initial_fatigue,
        body_mass=config.body_mass,
        target_radius=config.target_radius,
    )


def run_training(subject: SubjectSpec, config: ExperimentConfig) -> float:
    """Peak fatigue over one identity-mapping trial; the subject's reference."""
    log = run_condition_trial(Condition("default"), subject, config, f_max=0.0)
    f_max = peak_fatigue(f.fatigue for f in log.frames)
    if not f_max > 0.0:
        raise DegenerateTraining(
            "training trial accumulated no fatigue; adaptive thresholds would collapse"
        )
    return f_max


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Training plus all 11 conditions for every synthetic subject."""
    result = SweepResult()
    conditions = all_conditions()
    for subject in config.subjects():
        f_max = run_training(subject, config)
        result.f_max_by_subject[subject.index] = f_max
        for condition in conditions:
            log = run_condition_trial(condition, subject, config, f_max)
            summary = trial_summary(log)
            result.rows.append(
                SweepRow(
                    condition=condition.kind,
                    timing=condition.timing or "",
                    decay=condition.decay or "",
                    subject=subject.index,
                    seed=subject.seed,
                    cumulative_fatigue=summary["cumulative_fatigue"],
                    tct=summary["tct"],
                    mean_offset=summary["mean_offset"],
                )
            )
            if subject.index == 0:
                result.example_logs[condition.name] = log
    return result


def _row_name(row: SweepRow) -> str:
    if row.condition == "alphapig":
        return f"alphapig-{row.timing}-{row.decay}"
    return row.condition


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


@dataclass
class SweepSummary:
    condition_fatigue_means: dict[str, float]
    condition_offset_means: dict[str, float]
    condition_tct_means: dict[str, float]
    timing_fatigue_means: dict[str, float]
    decay_fatigue_means: dict[str, float]
    cell_fatigue_means: dict[str, dict[str, float]]  # timing -> decay -> mean
    h1_later_timing_more_fatigue: bool
    h2_low_decay_most_fatigue: bool
    adaptive_below_gogo: list[str]
    pareto_conditions: list[str]

    def as_dict(self) -> dict:
        return {
            "condition_means": {
                name: {
                    "cumulative_fatigue": self.condition_fatigue_means[name],
                    "mean_offset": self.condition_offset_means[name],
                    "tct": self.condition_tct_means[name],
                }
                for name in self.condition_fatigue_means
            },
            "timing_fatigue_means": self.timing_fatigue_means,
            "decay_fatigue_means": self.decay_fatigue_means,
            "cell_fatigue_means": self.cell_fatigue_means,
            "verdicts": {
                "h1_later_timing_more_fatigue": self.h1_later_timing_more_fatigue,
                "h2_low_decay_most_fatigue": self.h2_low_decay_most_fatigue,
            },
            "adaptive_below_gogo": self.adaptive_below_gogo,
            "pareto_conditions": self.pareto_conditions,
            "notes": {
                "mean_offset": (
                    "mean physical-to-virtual hand distance; reported as a "
                    "mechanistic proxy for embodiment cost, not a measurement of it"
                )
            },
        }


def summarize(rows: list[SweepRow]) -> SweepSummary:
    """Grouped means plus the directional verdicts evaluated on them.

    The timing verdict requires strictly increasing fatigue start -> quarter
    -> mid within every decay level; the decay verdict requires the low decay
    level to carry strictly more fatigue than both medium and high.
    """
    if not rows:
        raise ValueError("cannot summarize an empty table")

    by_name: dict[str, list[SweepRow]] = {}
    for row in rows:
        by_name.setdefault(_row_name(row), []).append(row)

    fatigue_means = {n: _mean([r.cumulative_fatigue for r in rs]) for n, rs in by_name.items()}
    offset_means = {n: _mean([r.mean_offset for r in rs]) for n, rs in by_name.items()}
    tct_means = {n: _mean([r.tct for r in rs]) for n, rs in by_name.items()}

    adaptive = [r for r in rows if r.condition == "alphapig"]
    timing_means = {
        t: _mean([r.cumulative_fatigue for r in adaptive if r.timing == t])
        for t in TIMING_LEVELS
        if any(r.timing == t for r in adaptive)
    }
    decay_means = {
        d: _mean([r.cumulative_fatigue for r in adaptive if r.decay == d])
        for d in DECAY_LEVELS
        if any(r.decay == d for r in adaptive)
    }
    cells: dict[str, dict[str, float]] = {}
    for t in TIMING_LEVELS:
        for d in DECAY_LEVELS:
            values = [
                r.cumulative_fatigue for r in adaptive if r.timing == t and r.decay == d
            ]
            if values:
                cells.setdefault(t, {})[d] = _mean(values)

    have_all_cells = all(
        d in cells.get(t, {}) for t in TIMING_LEVELS for d in DECAY_LEVELS
    )
    h1 = have_all_cells and all(
        cells["start"][d] < cells["quarter"][d] < cells["mid"][d]
        for d in DECAY_LEVELS
    )
    h2 = (
        set(decay_means) == set(DECAY_LEVELS)
        and decay_means["low"] > decay_means["medium"]
        and decay_means["low"] > decay_means["high"]
    )

    gogo_mean = fatigue_means.get("gogo", math.inf)
    below_gogo = sorted(
        name
        for name in fatigue_means
        if name.startswith("alphapig-") and fatigue_means[name] < gogo_mean
    )

    return SweepSummary(
        condition_fatigue_means=fatigue_means,
        condition_offset_means=offset_means,
        condition_tct_means=tct_means,
        timing_fatigue_means=timing_means,
        decay_fatigue_means=decay_means,
        cell_fatigue_means=cells,
        h1_later_timing_more_fatigue=h1,
        h2_low_decay_most_fatigue=h2,
        adaptive_below_gogo=below_gogo,
        pareto_conditions=pareto_front(rows),
    )


def pareto_front(rows: list[SweepRow]) -> list[str]:
    """Conditions not dominated on (cumulative fatigue, mean offset) means.

    Both objectives are minimized; ties break deterministically by the
    canonical condition enumeration order.
    """
    by_name: dict[str, list[SweepRow]] = {}
    for row in rows:
        by_name.setdefault(_row_name(row), []).append(row)
    enumeration = [c.name for c in all_conditions() if c.name in by_name]
    points = [
        (
            _mean([r.cumulative_fatigue for r in by_name[n]]),
            _mean([r.mean_offset for r in by_name[n]]),
        )
        for n in enumeration
    ]
    return [enumeration[i] for i in non_dominated(points)]


def non_dominated(points: list[tuple[float, ...]]) -> list[int]:
    """Indices of points not dominated under componentwise minimization.

    A point dominates another when it is <= in every objective and < in at
    least one. Survivor order follows the input order, which makes the
    tie-break deterministic.
    """
    if len(points) < 2:
        return list(range(len(points)))
    survivors = []
    for i, p in enumerate(points):
        dominated = False
        for j, q in enumerate(points):
            if j == i:
                continue
            if all(qk <= pk for qk, pk in zip(q, p)) and any(
                qk < pk for qk, pk in zip(q, p)
            ):
                dominated = True
                break
        if not dominated:
            survivors.append(i)
    return survivors


def table_csv(rows: list[SweepRow]) -> str:
    lines = ["condition,timing,decay,subject,seed,cumulative_fatigue,tct,mean_offset"]
    for r in rows:
        lines.append(
            f"{r.condition},{r.timing},{r.decay},{r.subject},{r.seed},"
            f"{r.cumulative_fatigue!r},{r.tct!r},{r.mean_offset!r}"
        )
    return "\n".join(lines) + "\n"


def pareto_csv(summary: SweepSummary) -> str:
    lines = ["condition,cumulative_fatigue,mean_offset"]
    for name in summary.pareto_conditions:
        lines.append(
            f"{name},{summary.condition_fatigue_means[name]!r},"
            f"{summary.condition_offset_means[name]!r}"
        )
    return "\n".join(lines) + "\n"


def trajectory_csv(log: TrialLog) -> str:
    """Columnar (t, theta, F) series for threshold/fatigue trajectory plots."""
    lines = ["t,theta,F"]
    for f in log.frames:
        lines.append(f"{f.t!r},{f.theta!r},{f.fatigue!r}")
    return "\n".join(lines) + "\n"
