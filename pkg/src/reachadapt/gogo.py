"""Nonlinear reach-extension mapping and its analytic inverse.

The mapping is isotropic: beyond a threshold radius D = theta * L the virtual
radius grows quadratically past the physical radius while the direction is
preserved, so the virtual hand is only ever pushed further out along the arm.
Below D it is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .controller import blend_positions
from .geometry import Vec3, radial_decompose

DEFAULT_QUADRATIC_GAIN = 1.0 / 12.0  # per meter, standard value


@dataclass(frozen=True)
class GoGoParams:
    """Quadratic gain k (1/m) and arm length L (m)."""

    k: float = DEFAULT_QUADRATIC_GAIN
    arm_length: float = 0.6

    def __post_init__(self) -> None:
        if self.k < 0.0:
            raise ValueError("k must be >= 0")
        if not self.arm_length > 0.0:
            raise ValueError("arm_length must be positive")

    def threshold(self, theta: float) -> float:
        return theta * self.arm_length


def map_radius(r: float, theta: float, params: GoGoParams) -> float:
    """Virtual radius for a physical radius: r + k*(r - D)^2 beyond D."""
    d = params.threshold(theta)
    if r < d:
        return r
    excess = r - d
    return r + params.k * excess * excess


def gogo_map(p_r: Vec3, theta: float, params: GoGoParams) -> Vec3:
    """Pre-smoothing virtual hand position for a physical hand position."""
    r, direction = radial_decompose(p_r)
    d = params.threshold(theta)
    if r <= d or params.k == 0.0:
        # At or below the threshold the map is the identity; return the input
        # bit-exactly instead of reconstructing direction * radius.
        return p_r
    return direction.scaled(map_radius(r, theta, params))


def gogo_blended_map(p_r: Vec3, theta: float, beta: float, params: GoGoParams) -> Vec3:
    """Post-smoothing virtual position: identity faded into the full mapping.

    Radially this is r + beta * k * (r - D)^2 for r >= D, identity otherwise.
    """
    if beta == 0.0:
        return p_r
    return blend_positions(p_r, gogo_map(p_r, theta, params), beta)


def blended_radius(r: float, theta: float, beta: float, params: GoGoParams) -> float:
    """Scalar radial form of the blended mapping."""
    d = params.threshold(theta)
    if r < d:
        return r
    excess = r - d
    return r + beta * params.k * excess * excess


def gogo_inverse(
    r_v_target: float, theta: float, beta: float, params: GoGoParams
) -> float:
    """Physical radius whose blended virtual radius equals r_v_target.

    The blended radial map is strictly increasing for k >= 0, so the inverse
    is unique. Beyond the threshold it is the positive root of
    a*u^2 + u = (r_v_target - D) with u = r - D and a = beta*k, evaluated in
    the rationalized form 2*(r_v_target - D) / (1 + sqrt(1 + 4a(r_v_target - D)))
    to avoid cancellation when a*(r_v_target - D) is tiny.
    """
    if r_v_target < 0.0:
        raise ValueError(f"virtual radius target must be >= 0, got {r_v_target}")
    a = beta * params.k
    d = params.threshold(theta)
    if a == 0.0 or r_v_target <= d:
        return r_v_target
    over = r_v_target - d
    return d + 2.0 * over / (1.0 + math.sqrt(1.0 + 4.0 * a * over))
