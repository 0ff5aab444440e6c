"""Real-time demo service: pointer frames in, redirected positions out.

One session per connection. Messages are JSON objects, one per WebSocket
text frame; every client message is answered by exactly one reply, so a
session transcript doubles as a replayable test fixture. The engine itself
(`DemoSession`) is transport-free and synchronous, which keeps it directly
unit-testable.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass

from websockets.sync.server import Server, serve

from .config import AppConfig
from .controller import (
    InterventionParams,
    InterventionState,
    alpha_of_fatigue,
    controller_step,
    theta_of_alpha,
)
from .fatigue import ArmAnthropometrics, FatigueModelParams, FatigueState, fatigue_step
from .geometry import ArmPose, Vec3, spherical_point
from .gogo import GoGoParams, gogo_blended_map

PROTOCOL_VERSION = 1
DEFAULT_PORT = 9460
MAX_MESSAGE_BYTES = 1024

# dt between frames is derived from client timestamps but clamped so a
# stalled client cannot dump minutes of exertion into the integrator.
DT_MIN = 1.0 / 240.0
DT_MAX = 1.0 / 15.0
FIRST_FRAME_DT = 1.0 / 60.0

POINTER_AZIMUTH_MIN = 60.0
POINTER_AZIMUTH_SPAN = 60.0
POINTER_REACH_MIN = 0.2
POINTER_REACH_SPAN = 0.8


def map_pointer(pointer_x: float, pointer_y: float, arm_length: float) -> Vec3:
    """2D pointer to hand position: x sweeps azimuth, y sweeps reach.

    Coordinates are clamped into the unit square. The hand stays in the
    horizontal plane (inclination 0), between 20% and 100% of arm length.
    """
    x = min(1.0, max(0.0, pointer_x))
    y = min(1.0, max(0.0, pointer_y))
    azimuth = POINTER_AZIMUTH_MIN + POINTER_AZIMUTH_SPAN * x
    radius = (POINTER_REACH_MIN + POINTER_REACH_SPAN * y) * arm_length
    return spherical_point(0.0, azimuth, radius)


def _error(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


@dataclass
class ServiceConfig:
    anthro: ArmAnthropometrics
    fatigue_params: FatigueModelParams
    params: InterventionParams
    gogo_k: float

    @staticmethod
    def from_app_config(config: AppConfig) -> "ServiceConfig":
        return ServiceConfig(
            anthro=config.anthropometrics(),
            fatigue_params=config.fatigue_params(),
            params=InterventionParams(
                fatigue_threshold=0.0,
                decay_rate=0.25,
                theta_0=config.theta_0,
                theta_1=config.theta_1,
                beta_step=config.beta_step,
            ),
            gogo_k=config.gogo_k,
        )


class DemoSession:
    """Protocol state machine for one connection."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.session_id = uuid.uuid4().hex[:12]
        self.established = False
        self.arm_length = 0.0
        self.body_mass = 0.0
        self.params = config.params
        self.gogo: GoGoParams | None = None
        self.fatigue = FatigueState()
        self.ctrl = InterventionState.initial(config.params)
        self.pose: Vec3 | None = None
        self.p_v: Vec3 | None = None
        self.last_t: float | None = None

    def handle_text(self, raw: str) -> str:
        if len(raw.encode("utf-8")) >= MAX_MESSAGE_BYTES:
            return json.dumps(_error("bad_message", "message exceeds 1 KiB"))
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            return json.dumps(_error("bad_message", "not valid JSON"))
        if not isinstance(msg, dict):
            return json.dumps(_error("bad_message", "expected a JSON object"))
        return json.dumps(self.handle(msg))

    def handle(self, msg: dict) -> dict:
        kind = msg.get("type")
        if kind == "hello":
            return self._handle_hello(msg)
        if kind == "frame":
            return self._handle_frame(msg)
        if kind == "set_params":
            return self._handle_set_params(msg)
        return _error("bad_message", f"unknown message type {kind!r}")

    def _handle_hello(self, msg: dict) -> dict:
        if self.established:
            return _error("bad_message", "session already established")
        if msg.get("version") != PROTOCOL_VERSION:
            return _error(
                "bad_version",
                f"this service speaks protocol version {PROTOCOL_VERSION}",
            )
        try:
            arm_length = float(msg["L"])
            body_mass = float(msg["body_mass"])
        except (KeyError, TypeError, ValueError):
            return _error("bad_message", "hello requires numeric L and body_mass")
        if not arm_length > 0.0 or not body_mass > 0.0:
            return _error("bad_message", "L and body_mass must be positive")
        self.arm_length = arm_length
        self.body_mass = body_mass
        self.gogo = GoGoParams(k=self.config.gogo_k, arm_length=arm_length)
        self.pose = Vec3(0.0, -arm_length, 0.0)  # arm hanging at rest
        self.p_v = self.pose
        self.established = True
        return {
            "type": "hello",
            "version": PROTOCOL_VERSION,
            "session": self.session_id,
        }

    def _state_msg(self, t: float) -> dict:
        return {
            "type": "state",
            "t": t,
            "p_r": list(self.pose.as_tuple()),
            "p_v": list(self.p_v.as_tuple()),
            "F": self.fatigue.fatigue,
            "theta": self.ctrl.theta,
            "alpha": self.ctrl.alpha,
            "beta": self.ctrl.beta,
        }

    def _handle_frame(self, msg: dict) -> dict:
        if not self.established:
            return _error("no_session", "send hello before frames")
        try:
            t = float(msg["t"])
            px = float(msg["pointer_x"])
            py = float(msg["pointer_y"])
        except (KeyError, TypeError, ValueError):
            return _error("bad_message", "frame requires numeric t, pointer_x, pointer_y")
        if self.last_t is not None and t <= self.last_t:
            return _error(
                "stale_frame", f"frame t={t!r} is not after last t={self.last_t!r}"
            )
        if self.last_t is None:
            dt = FIRST_FRAME_DT
        else:
            dt = min(DT_MAX, max(DT_MIN, t - self.last_t))

        # Charge the interval at the pose held since the previous frame,
        # then accept the new pointer position.
        held = ArmPose(hand=self.pose, arm_length=self.arm_length, body_mass=self.body_mass)
        self.fatigue = fatigue_step(
            self.fatigue, held, dt, self.config.anthro, self.config.fatigue_params
        )
        self.pose = map_pointer(px, py, self.arm_length)
        self.ctrl = controller_step(self.ctrl, self.fatigue.fatigue, self.params)
        self.p_v = gogo_blended_map(self.pose, self.ctrl.theta, self.ctrl.beta, self.gogo)
        self.last_t = t
        return self._state_msg(t)

    def _handle_set_params(self, msg: dict) -> dict:
        if not self.established:
            return _error("no_session", "send hello before set_params")
        updates = {}
        try:
            if "T_f" in msg:
                updates["fatigue_threshold"] = float(msg["T_f"])
            if "DR_alpha" in msg:
                updates["decay_rate"] = float(msg["DR_alpha"])
            if "theta_1" in msg:
                updates["theta_1"] = float(msg["theta_1"])
            if "beta_step" in msg:
                updates["beta_step"] = float(msg["beta_step"])
        except (TypeError, ValueError):
            return _error("bad_params", "parameter values must be numeric")
        if not updates:
            return _error("bad_params", "no recognized parameters in set_params")

        candidate = {
            "fatigue_threshold": self.params.fatigue_threshold,
            "decay_rate": self.params.decay_rate,
            "theta_0": self.params.theta_0,
            "theta_1": self.params.theta_1,
            "beta_step": self.params.beta_step,
        }
        candidate.update(updates)
        problem = _validate_params(candidate)
        if problem:
            return _error("bad_params", problem)
        # Swap atomically; the beta latch survives parameter changes, while
        # alpha and theta are re-derived immediately so this acknowledgment
        # (and every later state) stays self-consistent.
        self.params = InterventionParams(**candidate)
        alpha = alpha_of_fatigue(self.fatigue.fatigue, self.params)
        theta = theta_of_alpha(alpha, self.params)
        self.ctrl = InterventionState(
            alpha=alpha,
            beta=self.ctrl.beta,
            theta=theta,
            onset_triggered=self.ctrl.onset_triggered,
        )
        self.p_v = gogo_blended_map(self.pose, theta, self.ctrl.beta, self.gogo)
        return self._state_msg(self.last_t if self.last_t is not None else 0.0)


def _validate_params(candidate: dict) -> str | None:
    if not 0.0 <= candidate["fatigue_threshold"] <= 100.0:
        return "T_f must be in [0, 100]"
    if not 0.0 < candidate["decay_rate"] <= 1.0:
        return "DR_alpha must be in (0, 1]"
    if not 0.0 < candidate["theta_1"] < candidate["theta_0"]:
        return "theta_1 must be in (0, theta_0)"
    if not 0.0 < candidate["beta_step"] <= 1.0:
        return "beta_step must be in (0, 1]"
    return None


class DemoServer:
    """Threaded WebSocket server wrapping DemoSession per connection."""

    def __init__(self, config: ServiceConfig, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        self.config = config
        self.host = host
        self.port = port
        self._server: Server | None = None
        self._thread: threading.Thread | None = None

    def _handler(self, connection) -> None:
        session = DemoSession(self.config)
        for raw in connection:
            if isinstance(raw, bytes):
                reply = json.dumps(_error("bad_message", "binary frames not supported"))
            else:
                reply = session.handle_text(raw)
            connection.send(reply)

    def start_background(self) -> None:
        """Serve on a daemon thread; used by tests and embedding callers."""
        self._server = serve(
            self._handler, self.host, self.port, max_size=MAX_MESSAGE_BYTES
        )
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )
        self._thread.start()

    def serve_forever(self) -> None:
        self._server = serve(
            self._handler, self.host, self.port, max_size=MAX_MESSAGE_BYTES
        )
        self._server.serve_forever()

    def shutdown(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server = None
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def join(self, timeout: float | None = None) -> None:
        """Block until the background server thread exits."""
        if self._thread is not None:
            self._thread.join(timeout=timeout)

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    @property
    def bound_port(self) -> int:
        """Actual listening port; differs from `port` when 0 was requested."""
        if self._server is None:
            raise RuntimeError("server is not running")
        return self._server.socket.getsockname()[1]
