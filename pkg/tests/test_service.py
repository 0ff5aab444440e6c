import json
import math

import pytest
from websockets.sync.client import connect

from reachadapt.config import AppConfig
from reachadapt.controller import theta_of_alpha
from reachadapt.gogo import GoGoParams, gogo_blended_map
from reachadapt.geometry import Vec3
from reachadapt.service import (
    DemoServer,
    DemoSession,
    ServiceConfig,
    map_pointer,
)


@pytest.fixture()
def session():
    return DemoSession(ServiceConfig.from_app_config(AppConfig()))


def hello(session, L=0.6, mass=70.0, version=1):
    return session.handle({"type": "hello", "version": version, "L": L, "body_mass": mass})


def frame(session, t, x, y):
    return session.handle({"type": "frame", "t": t, "pointer_x": x, "pointer_y": y})


class TestMapPointer:
    def test_center_top_is_full_forward_reach(self):
        hand = map_pointer(0.5, 1.0, 0.6)
        assert hand.norm() == pytest.approx(0.6, abs=1e-12)
        assert hand.x == pytest.approx(0.0, abs=1e-12)
        assert hand.z == pytest.approx(0.6, abs=1e-12)

    def test_origin_is_short_reach_at_low_azimuth(self):
        hand = map_pointer(0.0, 0.0, 0.6)
        assert hand.norm() == pytest.approx(0.2 * 0.6, abs=1e-12)
        azimuth = math.degrees(math.atan2(hand.z, hand.x))
        assert azimuth == pytest.approx(60.0)

    def test_middle_reach(self):
        hand = map_pointer(0.5, 0.5, 0.6)
        assert hand.norm() == pytest.approx(0.6 * 0.6, abs=1e-12)

    def test_out_of_range_clamped(self):
        assert map_pointer(2.0, -3.0, 0.6) == map_pointer(1.0, 0.0, 0.6)


class TestHandshake:
    def test_hello_acknowledged(self, session):
        reply = hello(session)
        assert reply["type"] == "hello"
        assert reply["version"] == 1
        assert reply["session"]

    def test_wrong_version_rejected(self, session):
        reply = hello(session, version=2)
        assert reply == {
            "type": "error",
            "code": "bad_version",
            "detail": reply["detail"],
        }

    def test_frame_before_hello(self, session):
        reply = frame(session, 0.1, 0.5, 0.5)
        assert reply["code"] == "no_session"

    def test_set_params_before_hello(self, session):
        reply = session.handle({"type": "set_params", "T_f": 5.0})
        assert reply["code"] == "no_session"

    def test_double_hello_rejected(self, session):
        hello(session)
        assert hello(session)["type"] == "error"

    def test_nonsense_rejected(self, session):
        assert session.handle({"type": "dance"})["code"] == "bad_message"
        assert json.loads(session.handle_text("{not json"))["code"] == "bad_message"


class TestFrames:
    def test_cold_start_is_identity(self, session):
        hello(session)
        reply = frame(session, 0.0, 0.5, 0.1)
        assert reply["type"] == "state"
        assert reply["F"] == pytest.approx(0.0, abs=1e-9)
        assert reply["theta"] == 1.0
        assert reply["p_v"] == reply["p_r"]

    def test_sustained_reach_builds_fatigue_and_redirects(self, session):
        hello(session)
        last = None
        for i in range(600):  # ten seconds of full reach at 60 Hz
            last = frame(session, i / 60.0, 0.5, 1.0)
            assert last["type"] == "state"
        assert last["F"] > 1.0
        assert last["theta"] < 1.0
        r_v = math.sqrt(sum(c * c for c in last["p_v"]))
        r_r = math.sqrt(sum(c * c for c in last["p_r"]))
        assert r_v > r_r

    def test_stale_frame_rejected(self, session):
        hello(session)
        frame(session, 1.0, 0.5, 0.5)
        reply = frame(session, 1.0, 0.5, 0.5)
        assert reply["code"] == "stale_frame"
        # the next fresh frame still works
        assert frame(session, 1.1, 0.5, 0.5)["type"] == "state"

    def test_telemetry_self_consistent(self, session):
        hello(session)
        gogo = GoGoParams(arm_length=0.6)
        for i in range(120):
            reply = frame(session, i / 60.0, 0.8, 0.9)
            theta = theta_of_alpha(reply["alpha"], session.params)
            assert abs(theta - reply["theta"]) <= 1e-9
            p_v = gogo_blended_map(
                Vec3(*reply["p_r"]), reply["theta"], reply["beta"], gogo
            )
            assert all(
                abs(a - b) <= 1e-9 for a, b in zip(reply["p_v"], p_v.as_tuple())
            )


class TestSetParams:
    def test_update_acknowledged_with_state(self, session):
        hello(session)
        frame(session, 0.0, 0.5, 1.0)
        reply = session.handle({"type": "set_params", "DR_alpha": 0.45})
        assert reply["type"] == "state"
        assert session.params.decay_rate == 0.45

    def test_raising_threshold_zeros_alpha_but_keeps_latch(self, session):
        hello(session)
        for i in range(300):
            frame(session, i / 60.0, 0.5, 1.0)
        assert session.ctrl.alpha > 0.0
        assert session.ctrl.onset_triggered
        beta_before = session.ctrl.beta
        reply = session.handle({"type": "set_params", "T_f": 99.0})
        assert reply["alpha"] == 0.0
        assert reply["theta"] == 1.0
        assert reply["beta"] == beta_before
        assert session.ctrl.onset_triggered

    def test_invalid_values_leave_params_untouched(self, session):
        hello(session)
        before = session.params
        for bad in (
            {"theta_1": 0.0},
            {"theta_1": 1.5},
            {"DR_alpha": 0.0},
            {"DR_alpha": 2.0},
            {"T_f": -1.0},
            {"T_f": 101.0},
            {"beta_step": 0.0},
            {"DR_alpha": "hot"},
        ):
            reply = session.handle({"type": "set_params", **bad})
            assert reply["code"] == "bad_params"
            assert session.params == before

    def test_empty_update_rejected(self, session):
        hello(session)
        assert session.handle({"type": "set_params"})["code"] == "bad_params"


class TestServer:
    def test_socket_round_trip_and_isolation(self):
        server = DemoServer(ServiceConfig.from_app_config(AppConfig()), port=0)
        server.start_background()
        try:
            url = f"ws://127.0.0.1:{server.bound_port}"
            with connect(url) as a, connect(url) as b:
                a.send(json.dumps({"type": "hello", "version": 1, "L": 0.6, "body_mass": 70}))
                b.send(json.dumps({"type": "hello", "version": 1, "L": 0.7, "body_mass": 80}))
                ack_a = json.loads(a.recv())
                ack_b = json.loads(b.recv())
                assert ack_a["type"] == "hello" and ack_b["type"] == "hello"
                assert ack_a["session"] != ack_b["session"]

                # parameter changes on one session never leak to the other
                a.send(json.dumps({"type": "set_params", "DR_alpha": 0.45}))
                assert json.loads(a.recv())["type"] == "state"
                b.send(json.dumps({"type": "frame", "t": 0.0, "pointer_x": 0.5, "pointer_y": 0.5}))
                state_b = json.loads(b.recv())
                assert state_b["type"] == "state"
        finally:
            server.shutdown()

    def test_shutdown_is_idempotent(self):
        server = DemoServer(ServiceConfig.from_app_config(AppConfig()), port=0)
        server.start_background()
        server.shutdown()
        server.shutdown()
