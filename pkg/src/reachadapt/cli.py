"""Command-line entry point: calibrate, trial, sweep, serve.

Exit statuses: 0 success, 1 runtime failure, 2 usage or config error.
All file outputs are written atomically (temp file + rename) so interrupted
runs never leave corrupt artifacts behind.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import signal
import sys
import tempfile
from pathlib import Path

from .config import AppConfig, ConfigError, config_ini, load_config
from .experiment import (
    Condition,
    DegenerateTraining,
    ExperimentConfig,
    SubjectSpec,
    condition_params,
    pareto_csv,
    run_condition_trial,
    run_sweep,
    run_training,
    summarize,
    table_csv,
    trajectory_csv,
)
from .fatigue import CalibrationError, calibrate_gain, replay_final_fatigue
from .geometry import TimedFrame, ArmPose
from .service import DEFAULT_PORT, DemoServer, ServiceConfig
from .simulator import (
    MotionParams,
    TrialTimeout,
    cumulative_fatigue,
    frame_rows,
    run_trial,
    trial_summary,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def write_text_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _golden_subject(config: AppConfig) -> SubjectSpec:
    """The single-trial subject described by the config file itself."""
    return SubjectSpec(
        index=0,
        arm_length=config.arm_length,
        peak_speed=config.peak_speed,
        seed=config.seed,
    )


def _reference_trajectory(config: AppConfig) -> list[TimedFrame]:
    """Pose trajectory of the identity-mapping trial used for calibration.

    The identity condition's motion does not depend on the fatigue gain, so
    this trajectory is a fixed point of the calibration.
    """
    experiment = config.experiment()
    subject = _golden_subject(config)
    log = run_condition_trial(Condition("default"), subject, experiment, f_max=0.0)
    return [
        TimedFrame(
            t=f.t,
            pose=ArmPose(
                hand=f.p_r, arm_length=config.arm_length, body_mass=config.body_mass
            ),
        )
        for f in log.frames
    ]


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    trajectory = _reference_trajectory(config)
    try:
        gain = calibrate_gain(
            trajectory,
            config.calibration_target,
            config.anthropometrics(),
            config.fatigue_params(),
        )
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    achieved = replay_final_fatigue(
        trajectory, gain, config.anthropometrics(), config.fatigue_params()
    )
    out = Path(args.out)
    derived = dataclasses.replace(config, accumulation_gain=gain)
    write_text_atomic(out / "calibrated.ini", config_ini(derived))
    report = {
        "target_fatigue": config.calibration_target,
        "achieved_fatigue": achieved,
        "accumulation_gain": gain,
        "trajectory_span_s": trajectory[-1].t - trajectory[0].t,
    }
    write_text_atomic(out / "calibration.json", json.dumps(report, indent=2) + "\n")
    print(
        f"calibrated accumulation_gain = {gain!r} "
        f"(target {config.calibration_target}%, achieved {achieved:.6f}%)"
    )
    print(f"wrote {out / 'calibrated.ini'} and {out / 'calibration.json'}")
    return EXIT_OK


def _mapping_for_trial(args: argparse.Namespace, config: AppConfig):
    if args.condition == "alphapig":
        if not args.timing or not args.decay:
            raise SystemExit2("alphapig requires --timing and --decay")
        condition = Condition("alphapig", timing=args.timing, decay=args.decay)
    else:
        if args.timing or args.decay:
            raise SystemExit2(f"{args.condition} takes no --timing/--decay")
        condition = Condition(args.condition)

    experiment = config.experiment()
    subject = SubjectSpec(
        index=0,
        arm_length=config.arm_length,
        peak_speed=config.peak_speed,
        seed=args.seed if args.seed is not None else config.seed,
    )
    f_max = 0.0
    if condition.kind == "alphapig":
        f_max = run_training(subject, experiment)
    return condition, condition_params(condition, f_max, beta_step=config.beta_step), subject


class SystemExit2(Exception):
    """Usage error discovered after argparse; exits with status 2."""


def cmd_trial(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    condition, mapping, subject = _mapping_for_trial(args, config)
    log = run_trial(
        mapping,
        arm_length=subject.arm_length,
        seed=subject.seed,
        anthro=config.anthropometrics(),
        fatigue_params=config.fatigue_params(),
        motion=MotionParams(peak_speed=subject.peak_speed, dwell=config.dwell),
        initial_fatigue=config.initial_fatigue,
        body_mass=config.body_mass,
        target_radius=config.target_radius,
    )
    out = Path(args.out)
    write_text_atomic(out / f"{condition.name}-seed{subject.seed}.csv",
                      "\n".join(frame_rows(log)) + "\n")
    summary = {"condition": condition.name, "seed": subject.seed, **trial_summary(log)}
    write_text_atomic(
        out / f"{condition.name}-seed{subject.seed}-summary.json",
        json.dumps(summary, indent=2) + "\n",
    )
    print(
        f"{condition.name} seed={subject.seed}: "
        f"tct={log.tct:.3f}s cumulative_fatigue={cumulative_fatigue(log):.4f}% "
        f"mean_offset={log.mean_offset:.6f}m"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    experiment: ExperimentConfig = config.experiment()
    if not experiment.arm_lengths or not experiment.peak_speeds:
        print("config error: experiment needs at least one subject", file=sys.stderr)
        return EXIT_USAGE
    result = run_sweep(experiment)
    summary = summarize(result.rows)
    out = Path(args.out)
    write_text_atomic(out / "sweep.csv", table_csv(result.rows))
    payload = summary.as_dict()
    payload["f_max_by_subject"] = {str(k): v for k, v in result.f_max_by_subject.items()}
    write_text_atomic(out / "summary.json", json.dumps(payload, indent=2) + "\n")
    write_text_atomic(out / "pareto.csv", pareto_csv(summary))
    for name, log in result.example_logs.items():
        write_text_atomic(out / "trajectories" / f"{name}.csv", trajectory_csv(log))
    print(f"wrote {len(result.rows)} rows to {out / 'sweep.csv'}")
    print(f"H1 (later timing, more fatigue): {'PASS' if summary.h1_later_timing_more_fatigue else 'FAIL'}")
    print(f"H2 (low decay, most fatigue):    {'PASS' if summary.h2_low_decay_most_fatigue else 'FAIL'}")
    print(f"adaptive conditions below fixed go-go: {', '.join(summary.adaptive_below_gogo) or 'none'}")
    print(f"pareto front: {', '.join(summary.pareto_conditions)}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.port is not None and not 0 < args.port < 65536:
        print(f"invalid port {args.port}", file=sys.stderr)
        return EXIT_USAGE
    port = args.port if args.port is not None else DEFAULT_PORT
    server = DemoServer(ServiceConfig.from_app_config(config), port=port)
    stopping = False

    def _interrupt(signum, frame):
        nonlocal stopping
        if not stopping:
            stopping = True
            print("\nshutting down", flush=True)
            server.shutdown()

    try:
        server.start_background()
    except OSError as exc:
        print(f"cannot listen on port {port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    previous = signal.signal(signal.SIGINT, _interrupt)
    print(f"listening on ws://{server.host}:{port} (protocol v1)", flush=True)
    try:
        while server.running:
            server.join(timeout=0.2)
    finally:
        signal.signal(signal.SIGINT, previous)
        server.shutdown()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reachadapt",
        description=(
            "Fatigue-driven adaptation of reach redirection: calibrate the "
            "fatigue model, run simulated pointing trials and condition "
            "sweeps, or serve the interactive demo."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="INI config file (defaults built in)")

    p_cal = sub.add_parser("calibrate", help="fit the fatigue accumulation gain")
    add_common(p_cal)
    p_cal.add_argument("--out", default="out", help="output directory")
    p_cal.set_defaults(func=cmd_calibrate)

    p_trial = sub.add_parser("trial", help="run one simulated pointing trial")
    add_common(p_trial)
    p_trial.add_argument("--condition", required=True, choices=["default", "gogo", "alphapig"])
    p_trial.add_argument("--timing", choices=["start", "quarter", "mid"])
    p_trial.add_argument("--decay", choices=["low", "medium", "high"])
    p_trial.add_argument("--seed", type=int, default=None)
    p_trial.add_argument("--out", default="out", help="output directory")
    p_trial.set_defaults(func=cmd_trial)

    p_sweep = sub.add_parser("sweep", help="run the full 11-condition sweep")
    add_common(p_sweep)
    p_sweep.add_argument("--out", default="out", help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_serve = sub.add_parser("serve", help="serve the live demo protocol")
    add_common(p_serve)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CalibrationError, DegenerateTraining, TrialTimeout) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
