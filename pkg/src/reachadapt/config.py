"""INI configuration shared by the CLI and the demo service.

Sections: [fatigue], [intervention], [gogo], [simulation], [experiment].
Every key has a built-in default, so a config file only needs the values it
overrides. Command-line flags take precedence over file values.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path

from .controller import DEFAULT_BETA_STEP
from .experiment import (
    SUBJECT_ARM_LENGTHS,
    SUBJECT_PEAK_SPEEDS,
    THETA_DEFAULT,
    THETA_MAX_INTERVENTION,
    ExperimentConfig,
)
from .fatigue import ArmAnthropometrics, FatigueModelParams
from .gogo import DEFAULT_QUADRATIC_GAIN


class ConfigError(ValueError):
    """Invalid or unreadable configuration; fatal for the CLI."""


@dataclass(frozen=True)
class AppConfig:
    # [fatigue]
    arm_mass: float = 3.5
    com_fraction: float = 0.45
    tau_max: float = 40.0
    rest_threshold: float = 0.05
    recovery_rate: float = 0.1
    accumulation_gain: float = 3.9684611237607896  # calibrated, see calibrate command
    calibration_target: float = 12.0
    # [intervention]
    theta_0: float = THETA_DEFAULT
    theta_1: float = THETA_MAX_INTERVENTION
    beta_step: float = DEFAULT_BETA_STEP
    # [gogo]
    gogo_k: float = DEFAULT_QUADRATIC_GAIN
    # [simulation]
    peak_speed: float = 1.0
    dwell: float = 0.0
    target_radius: float = 0.025
    initial_fatigue: float = 0.0
    # [experiment]
    arm_length: float = 0.6
    body_mass: float = 70.0
    seed: int = 7
    subject_arm_lengths: tuple[float, ...] = SUBJECT_ARM_LENGTHS
    subject_peak_speeds: tuple[float, ...] = SUBJECT_PEAK_SPEEDS

    def anthropometrics(self) -> ArmAnthropometrics:
        return ArmAnthropometrics(
            arm_mass=self.arm_mass,
            com_fraction=self.com_fraction,
            tau_max=self.tau_max,
        )

    def fatigue_params(self) -> FatigueModelParams:
        return FatigueModelParams(
            accumulation_gain=self.accumulation_gain,
            recovery_rate=self.recovery_rate,
            rest_threshold=self.rest_threshold,
        )

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(
            anthro=self.anthropometrics(),
            fatigue_params=self.fatigue_params(),
            base_seed=self.seed,
            arm_lengths=self.subject_arm_lengths,
            peak_speeds=self.subject_peak_speeds,
            dwell=self.dwell,
            target_radius=self.target_radius,
            beta_step=self.beta_step,
            gogo_k=self.gogo_k,
            body_mass=self.body_mass,
            initial_fatigue=self.initial_fatigue,
        )


_FLOAT_KEYS = {
    ("fatigue", "arm_mass"): "arm_mass",
    ("fatigue", "com_fraction"): "com_fraction",
    ("fatigue", "tau_max"): "tau_max",
    ("fatigue", "rest_threshold"): "rest_threshold",
    ("fatigue", "recovery_rate"): "recovery_rate",
    ("fatigue", "accumulation_gain"): "accumulation_gain",
    ("fatigue", "calibration_target"): "calibration_target",
    ("intervention", "theta_0"): "theta_0",
    ("intervention", "theta_1"): "theta_1",
    ("intervention", "beta_step"): "beta_step",
    ("gogo", "k"): "gogo_k",
    ("simulation", "peak_speed"): "peak_speed",
    ("simulation", "dwell"): "dwell",
    ("simulation", "target_radius"): "target_radius",
    ("simulation", "initial_fatigue"): "initial_fatigue",
    ("experiment", "arm_length"): "arm_length",
    ("experiment", "body_mass"): "body_mass",
}

_INT_KEYS = {("experiment", "seed"): "seed"}

_LIST_KEYS = {
    ("experiment", "subject_arm_lengths"): "subject_arm_lengths",
    ("experiment", "subject_peak_speeds"): "subject_peak_speeds",
}

_KNOWN_SECTIONS = {"fatigue", "intervention", "gogo", "simulation", "experiment"}


def _parse_float_list(raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def load_config(path: str | Path | None = None) -> AppConfig:
    """Defaults overlaid with the values from an INI file, if one is given."""
    config = AppConfig()
    if path is None:
        return config
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    overrides: dict[str, object] = {}
    for section in parser.sections():
        if section not in _KNOWN_SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            spot = (section, key)
            try:
                if spot in _FLOAT_KEYS:
                    overrides[_FLOAT_KEYS[spot]] = float(raw)
                elif spot in _INT_KEYS:
                    overrides[_INT_KEYS[spot]] = int(raw)
                elif spot in _LIST_KEYS:
                    overrides[_LIST_KEYS[spot]] = _parse_float_list(raw)
                else:
                    raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(
                    f"{path}: bad value for {key!r} in [{section}]: {raw!r}"
                ) from exc
    try:
        merged = replace(config, **overrides)
        # Validate the derived structures eagerly so errors surface at load.
        merged.anthropometrics()
        merged.fatigue_params()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return merged


def config_ini(config: AppConfig) -> str:
    """Serialize a config as INI text, all keys explicit."""
    lists = {
        "subject_arm_lengths": ", ".join(repr(v) for v in config.subject_arm_lengths),
        "subject_peak_speeds": ", ".join(repr(v) for v in config.subject_peak_speeds),
    }
    return (
        "[fatigue]\n"
        f"arm_mass = {config.arm_mass!r}\n"
        f"com_fraction = {config.com_fraction!r}\n"
        f"tau_max = {config.tau_max!r}\n"
        f"rest_threshold = {config.rest_threshold!r}\n"
        f"recovery_rate = {config.recovery_rate!r}\n"
        f"accumulation_gain = {config.accumulation_gain!r}\n"
        f"calibration_target = {config.calibration_target!r}\n"
        "\n[intervention]\n"
        f"theta_0 = {config.theta_0!r}\n"
        f"theta_1 = {config.theta_1!r}\n"
        f"beta_step = {config.beta_step!r}\n"
        "\n[gogo]\n"
        f"k = {config.gogo_k!r}\n"
        "\n[simulation]\n"
        f"peak_speed = {config.peak_speed!r}\n"
        f"dwell = {config.dwell!r}\n"
        f"target_radius = {config.target_radius!r}\n"
        f"initial_fatigue = {config.initial_fatigue!r}\n"
        "\n[experiment]\n"
        f"arm_length = {config.arm_length!r}\n"
        f"body_mass = {config.body_mass!r}\n"
        f"seed = {config.seed}\n"
        f"subject_arm_lengths = {lists['subject_arm_lengths']}\n"
        f"subject_peak_speeds = {lists['subject_peak_speeds']}\n"
    )
