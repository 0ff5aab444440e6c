"""Shoulder-frame geometric primitives shared by every module.

Coordinate convention: right-handed frame with the origin at the shoulder,
+y up, +z forward from the chest. All distances in meters, times in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Direction reported for a zero-length vector (hand exactly at the shoulder).
ZERO_DIRECTION_FORWARD = (0.0, 0.0, 1.0)

# Tracking-noise allowance on the hand-radius invariant of ArmPose.
POSE_RADIUS_TOLERANCE = 1.05


@dataclass(frozen=True)
class Vec3:
    """Immutable 3-vector in the shoulder frame."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def distance_to(self, other: "Vec3") -> float:
        return (self - other).norm()

    def horizontal_radius(self) -> float:
        """Distance from the vertical (y) axis; the gravity lever arm."""
        return math.hypot(self.x, self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class ArmPose:
    """Physical hand position plus the anthropometrics the torque model needs.

    hand is shoulder-relative; arm_length is the calibrated reach L used as
    the redirection distance unit; body_mass feeds nothing today but is part
    of the session handshake and kept for fatigue models that want it.
    """

    hand: Vec3
    arm_length: float
    body_mass: float

    def __post_init__(self) -> None:
        if not self.arm_length > 0.0:
            raise ValueError(f"arm_length must be positive, got {self.arm_length}")
        if not self.body_mass > 0.0:
            raise ValueError(f"body_mass must be positive, got {self.body_mass}")
        reach = self.hand.norm()
        if reach > POSE_RADIUS_TOLERANCE * self.arm_length:
            raise ValueError(
                f"hand radius {reach:.4f} m exceeds "
                f"{POSE_RADIUS_TOLERANCE:g} * arm_length ({self.arm_length:.4f} m)"
            )


@dataclass(frozen=True)
class TimedFrame:
    """One timestamped pose sample; sequences are non-decreasing in t."""

    t: float
    pose: ArmPose


def radial_decompose(p: Vec3) -> tuple[float, Vec3]:
    """Split p into (radius, unit direction).

    The zero vector decomposes to radius 0 with the +z (forward) direction so
    the hand-at-shoulder case stays total instead of erroring mid-loop.
    """
    r = p.norm()
    if r == 0.0:
        return 0.0, Vec3(*ZERO_DIRECTION_FORWARD)
    return r, Vec3(p.x / r, p.y / r, p.z / r)


def spherical_point(inclination_deg: float, azimuth_deg: float, radius: float) -> Vec3:
    """Point at the given elevation above horizontal and azimuth, in meters.

    Azimuth 90 degrees is straight ahead (+z); inclination 0 is the
    horizontal plane, positive up.
    """
    inc = math.radians(inclination_deg)
    az = math.radians(azimuth_deg)
    return Vec3(
        radius * math.cos(inc) * math.cos(az),
        radius * math.sin(inc),
        radius * math.cos(inc) * math.sin(az),
    )
