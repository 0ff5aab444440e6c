import math

import pytest

from reachadapt.controller import InterventionParams
from reachadapt.fatigue import ArmAnthropometrics, FatigueModelParams
from reachadapt.geometry import Vec3
from reachadapt.gogo import GoGoParams, gogo_blended_map
from reachadapt.simulator import (
    FRAME_DT,
    FixedMapping,
    FrameRecord,
    MotionParams,
    TrialLog,
    TrialTimeout,
    cumulative_fatigue,
    frame_rows,
    generate_grid,
    plan_step,
    run_trial,
    sample_targets,
)

ANTHRO = ArmAnthropometrics()
FPARAMS = FatigueModelParams(accumulation_gain=3.9684611237607896)

DEFAULT = FixedMapping(theta=1.0, beta=0.0)
GOGO = FixedMapping(theta=2.0 / 3.0, beta=1.0)


def quick_trial(mapping, seed=7, arm_length=0.6, **kwargs):
    return run_trial(
        mapping,
        arm_length=arm_length,
        seed=seed,
        anthro=ANTHRO,
        fatigue_params=FPARAMS,
        **kwargs,
    )


class TestGrid:
    def test_has_81_points_all_at_arm_length(self):
        grid = generate_grid(0.6)
        assert len(grid) == 81
        for p in grid.points:
            assert abs(p.norm() - 0.6) <= 1e-9

    def test_corner_is_low_left(self):
        grid = generate_grid(0.6)
        first = grid.points[0]
        assert math.degrees(math.asin(first.y / 0.6)) == pytest.approx(-30.0)
        azimuth = math.degrees(math.atan2(first.z, first.x))
        assert azimuth == pytest.approx(60.0)

    def test_center_is_straight_ahead(self):
        grid = generate_grid(0.6)
        center = grid.points[4 * 9 + 4]
        assert center.x == pytest.approx(0.0, abs=1e-12)
        assert center.y == pytest.approx(0.0, abs=1e-12)
        assert center.z == pytest.approx(0.6)

    def test_symmetric_about_forward_plane(self):
        grid = generate_grid(0.6)
        for i in range(9):
            row = grid.points[i * 9:(i + 1) * 9]
            for j in range(9):
                mirrored = row[8 - j]
                assert row[j].x == pytest.approx(-mirrored.x, abs=1e-12)
                assert row[j].z == pytest.approx(mirrored.z, abs=1e-12)

    def test_rejects_bad_arm_length(self):
        with pytest.raises(ValueError):
            generate_grid(0.0)


class TestTargetSampling:
    def test_full_sample_is_permutation(self):
        grid = generate_grid(0.6)
        plan = sample_targets(grid, n=81, seed=3)
        assert sorted(plan.target_indices) == list(range(81))

    def test_same_seed_same_order(self):
        grid = generate_grid(0.6)
        a = sample_targets(grid, seed=11)
        b = sample_targets(grid, seed=11)
        assert a.target_indices == b.target_indices

    def test_different_seeds_differ(self):
        grid = generate_grid(0.6)
        assert (
            sample_targets(grid, seed=0).target_indices
            != sample_targets(grid, seed=1).target_indices
        )

    def test_golden_orders_frozen(self):
        # Frozen once from the seeded shuffle; guards against regressions in
        # the shuffling scheme, which would silently change every trial.
        grid = generate_grid(0.6)
        assert sample_targets(grid, seed=0).target_indices[:10] == (
            24, 48, 26, 75, 9, 76, 29, 44, 37, 60,
        )
        assert sample_targets(grid, seed=1).target_indices[:10] == (
            67, 4, 11, 2, 44, 30, 36, 70, 25, 7,
        )

    def test_rejects_oversample(self):
        with pytest.raises(ValueError):
            sample_targets(generate_grid(0.6), n=82, seed=0)


class TestPlanStep:
    def test_already_there(self):
        goal = Vec3(0.1, 0.2, 0.3)
        assert plan_step(goal, goal, FRAME_DT, MotionParams()) == goal

    def test_bounded_advance(self):
        out = plan_step(Vec3(0, 0, 0.4), Vec3(0, 0, 0.5), FRAME_DT, MotionParams(peak_speed=1.0))
        assert out.z == pytest.approx(0.4 + 1.0 / 60.0, abs=1e-15)

    def test_exact_arrival_when_close(self):
        out = plan_step(Vec3(0, 0, 0.4), Vec3(0, 0, 0.401), FRAME_DT, MotionParams(peak_speed=1.0))
        assert out == Vec3(0, 0, 0.401)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            plan_step(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.0, MotionParams())


class TestRunTrial:
    def test_default_condition_is_identity_every_frame(self):
        log = quick_trial(DEFAULT)
        for f in log.frames:
            assert f.p_v == f.p_r
        assert log.mean_offset == 0.0

    def test_gogo_offsets_beyond_two_thirds(self):
        log = quick_trial(GOGO)
        threshold = 2.0 / 3.0 * 0.6
        saw_offset = False
        for f in log.frames:
            r = f.p_r.norm()
            gap = f.p_v.distance_to(f.p_r)
            if r > threshold + 1e-9:
                assert gap > 0.0
                saw_offset = True
            elif r < threshold - 1e-9:
                assert gap == 0.0
        assert saw_offset

    def test_frames_are_evenly_timed(self):
        log = quick_trial(DEFAULT)
        for k, f in enumerate(log.frames):
            assert f.t == k * FRAME_DT

    def test_deterministic_bit_for_bit(self):
        a = quick_trial(GOGO, seed=12)
        b = quick_trial(GOGO, seed=12)
        assert a.frames == b.frames

    def test_seed_changes_trajectory(self):
        a = quick_trial(DEFAULT, seed=1)
        b = quick_trial(DEFAULT, seed=2)
        assert a.frames != b.frames

    def test_frame_invariant_recomputable(self):
        params = InterventionParams(
            fatigue_threshold=0.0, decay_rate=0.45, theta_0=1.0, theta_1=1.0 / 6.0
        )
        log = quick_trial(params)
        gogo = GoGoParams(arm_length=0.6)
        for f in log.frames:
            recomputed = gogo_blended_map(f.p_r, f.theta, f.beta, gogo)
            assert recomputed == f.p_v

    def test_physical_speed_bound(self):
        params = InterventionParams(
            fatigue_threshold=0.0, decay_rate=0.45, theta_0=1.0, theta_1=1.0 / 6.0
        )
        log = quick_trial(params, motion=MotionParams(peak_speed=1.2))
        for prev, cur in zip(log.frames, log.frames[1:]):
            assert cur.p_r.distance_to(prev.p_r) <= 1.2 * FRAME_DT + 1e-12

    def test_hand_never_over_reaches(self):
        log = quick_trial(GOGO)
        for f in log.frames:
            assert f.p_r.norm() <= 0.6 + 1e-12

    def test_early_strong_intervention_reduces_final_fatigue(self):
        start_high = InterventionParams(
            fatigue_threshold=0.0, decay_rate=0.45, theta_0=1.0, theta_1=1.0 / 6.0
        )
        mid_high = InterventionParams(
            fatigue_threshold=6.0, decay_rate=0.45, theta_0=1.0, theta_1=1.0 / 6.0
        )
        early = quick_trial(start_high, seed=7)
        late = quick_trial(mid_high, seed=7)
        assert cumulative_fatigue(early) < cumulative_fatigue(late)
        assert early.mean_offset >= late.mean_offset

    def test_timeout_is_diagnosed(self):
        with pytest.raises(TrialTimeout):
            quick_trial(DEFAULT, motion=MotionParams(peak_speed=1e-4))

    def test_rejects_empty_target_list(self):
        with pytest.raises(ValueError):
            quick_trial(DEFAULT, n_targets=0)


class TestCumulativeFatigue:
    @staticmethod
    def _log_with_fatigue(values):
        frames = [
            FrameRecord(
                t=i * FRAME_DT, p_r=Vec3(0, 0, 0.3), p_v=Vec3(0, 0, 0.3),
                fatigue=v, theta=1.0, alpha=0.0, beta=0.0,
            )
            for i, v in enumerate(values)
        ]
        return TrialLog(frames=frames)

    def test_constant_series(self):
        log = self._log_with_fatigue([12.0] * 120)
        assert cumulative_fatigue(log) == pytest.approx(12.0, abs=1e-12)

    def test_linear_last_second(self):
        values = [0.0] * 60 + [10.0 + i / 59.0 for i in range(60)]
        log = self._log_with_fatigue(values)
        expected = sum(values[-60:]) / 60.0
        assert cumulative_fatigue(log) == pytest.approx(expected, abs=1e-12)
        assert cumulative_fatigue(log) == pytest.approx(10.5, abs=1.0 / 59.0)

    def test_too_short_rejected(self):
        log = self._log_with_fatigue([1.0] * 59)
        with pytest.raises(ValueError):
            cumulative_fatigue(log)


def test_frame_rows_roundtrip_exactly():
    log = quick_trial(GOGO)
    rows = frame_rows(log)
    assert rows[0].startswith("t,p_r_x")
    assert len(rows) == len(log.frames) + 1
    sample = rows[1 + len(log.frames) // 2].split(",")
    frame = log.frames[len(log.frames) // 2]
    assert float(sample[0]) == frame.t
    assert float(sample[4]) == frame.p_v.x
    assert float(sample[7]) == frame.fatigue
