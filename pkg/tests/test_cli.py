import json
from pathlib import Path

import pytest

from reachadapt.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "configs" / "golden.ini"


def write_small_config(tmp_path, extra=""):
    """Config with a single synthetic subject to keep CLI tests quick."""
    path = tmp_path / "small.ini"
    path.write_text(
        "[experiment]\n"
        "subject_arm_lengths = 0.6\n"
        "subject_peak_speeds = 1.0\n" + extra
    )
    return path


class TestCalibrate:
    def test_golden_config_report(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["calibrate", "--config", str(GOLDEN), "--out", str(out)])
        assert code == 0
        report = json.loads((out / "calibration.json").read_text())
        assert abs(report["achieved_fatigue"] - report["target_fatigue"]) <= 0.01
        derived = (out / "calibrated.ini").read_text()
        assert f"accumulation_gain = {report['accumulation_gain']!r}" in derived

    def test_missing_config_exits_2(self, tmp_path, capsys):
        code = main(["calibrate", "--config", str(tmp_path / "absent.ini")])
        assert code == 2
        assert "absent.ini" in capsys.readouterr().err

    def test_all_rest_threshold_fails_cleanly(self, tmp_path, capsys):
        config = tmp_path / "norest.ini"
        config.write_text("[fatigue]\nrest_threshold = 0.999999\n")
        code = main(["calibrate", "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "calibration failed" in capsys.readouterr().err


class TestTrial:
    def test_default_trial_prints_zero_offset(self, tmp_path, capsys):
        config = write_small_config(tmp_path)
        out = tmp_path / "out"
        code = main(["trial", "--condition", "default", "--seed", "7",
                     "--config", str(config), "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "mean_offset=0.000000m" in printed
        log = (out / "default-seed7.csv").read_text()
        assert log.splitlines()[0] == "t,p_r_x,p_r_y,p_r_z,p_v_x,p_v_y,p_v_z,F,theta,alpha,beta"

    def test_adaptive_trial_writes_expected_columns(self, tmp_path):
        config = write_small_config(tmp_path)
        out = tmp_path / "out"
        code = main(["trial", "--condition", "alphapig", "--timing", "start",
                     "--decay", "high", "--seed", "7",
                     "--config", str(config), "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "alphapig-start-high-seed7-summary.json").read_text())
        assert summary["condition"] == "alphapig-start-high"
        assert summary["mean_offset"] > 0.0

    def test_same_flags_byte_identical_logs(self, tmp_path):
        config = write_small_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = ["trial", "--condition", "gogo", "--seed", "3", "--config", str(config)]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert (out_a / "gogo-seed3.csv").read_bytes() == (out_b / "gogo-seed3.csv").read_bytes()

    def test_unknown_condition_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["trial", "--condition", "warp"])
        assert exc.value.code == 2

    def test_alphapig_without_levels_is_usage_error(self, tmp_path, capsys):
        config = write_small_config(tmp_path)
        code = main(["trial", "--condition", "alphapig", "--config", str(config),
                     "--out", str(tmp_path / "o")])
        assert code == 2

    def test_default_with_levels_is_usage_error(self, tmp_path, capsys):
        config = write_small_config(tmp_path)
        code = main(["trial", "--condition", "default", "--timing", "start",
                     "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == 2


class TestSweep:
    def test_small_sweep_artifacts(self, tmp_path, capsys):
        config = write_small_config(tmp_path)
        out = tmp_path / "out"
        code = main(["sweep", "--config", str(config), "--out", str(out)])
        assert code == 0
        lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 11  # one subject, 11 conditions
        assert (out / "summary.json").is_file()
        assert (out / "pareto.csv").is_file()
        trajectories = sorted(p.name for p in (out / "trajectories").iterdir())
        assert "default.csv" in trajectories
        assert "alphapig-mid-high.csv" in trajectories
        printed = capsys.readouterr().out
        assert "H1" in printed and "H2" in printed

    def test_empty_subject_list_is_usage_error(self, tmp_path, capsys):
        config = tmp_path / "empty.ini"
        config.write_text("[experiment]\nsubject_arm_lengths =\n")
        code = main(["sweep", "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == 2


class TestServe:
    def test_invalid_port_zero_is_usage_error(self, capsys):
        code = main(["serve", "--port", "0"])
        assert code == 2

    def test_port_in_use_is_runtime_error(self, capsys):
        import socket

        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            code = main(["serve", "--port", str(port)])
        finally:
            blocker.close()
        assert code == 1
        assert "cannot listen" in capsys.readouterr().err
