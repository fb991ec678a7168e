"""Planar interceptor-target engagement kinematics.

All angles are radians internally; speeds m/s; ranges m. The engagement
state of one interceptor is (r, theta, gamma): relative separation, line
of sight angle, and heading. The look angle delta = gamma - theta is the
angle between the velocity vector and the sight line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

TWO_PI = 2.0 * math.pi

TARGET_KINDS = ("stationary", "constant_speed", "maneuvering")


class DegenerateRangeError(ValueError):
    """Raised when kinematic rates are requested below the capture radius."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi], ties at pi mapped to +pi."""
    a = math.fmod(angle, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


def look_angle(gamma: float, theta: float) -> float:
    """Look angle delta = gamma - theta, wrapped to (-pi, pi]."""
    return wrap_angle(gamma - theta)


def heading_rate(accel: float, speed: float) -> float:
    """Turn rate of a vehicle steered by lateral acceleration: a / v."""
    if speed <= 0.0:
        raise ValueError(f"speed must be positive, got {speed}")
    return accel / speed


@dataclass(frozen=True)
class InterceptorKinematics:
    """Kinematic state of one interceptor relative to the target.

    r > 0 until capture; v is constant for the whole engagement and must
    exceed the target speed. |look angle| < pi/2 is assumed at t = 0.
    """

    r: float
    theta: float
    gamma: float
    v: float

    @property
    def delta(self) -> float:
        return look_angle(self.gamma, self.theta)


def _zero_accel(_t: float) -> float:
    return 0.0


@dataclass(frozen=True)
class TargetModel:
    """Target motion model: stationary, constant speed, or maneuvering.

    accel_profile maps time to lateral acceleration and must be
    identically zero unless kind == "maneuvering".
    """

    kind: str
    v_t: float = 0.0
    gamma_t: float = 0.0
    accel_profile: Callable[[float], float] = field(default=_zero_accel)
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "stationary" and self.v_t != 0.0:
            raise ValueError("stationary target must have v_t = 0")
        if self.kind != "stationary" and self.v_t <= 0.0:
            raise ValueError("moving target must have v_t > 0")

    def accel(self, t: float) -> float:
        if self.kind != "maneuvering":
            return 0.0
        return self.accel_profile(t)


@dataclass(frozen=True)
class RelativeRates:
    """Relative velocity components along and perpendicular to the LOS.

    v_r is r_dot exactly and v_theta is r * theta_dot exactly.
    """

    r_dot: float
    theta_dot: float
    v_r: float
    v_theta: float


def relative_rates(
    ik: InterceptorKinematics, tgt: TargetModel, capture_radius: float = 0.0
) -> RelativeRates:
    """Closing and LOS rates for the current state.

    r_dot   = v_T cos(gamma_T - theta) - v cos(delta)
    theta_dot = (v_T sin(gamma_T - theta) - v sin(delta)) / r

    tgt.gamma_t is the target heading at the same instant as ik.
    """
    if ik.r <= capture_radius or ik.r <= 0.0:
        raise DegenerateRangeError(f"range {ik.r} at or below capture radius")
    bearing = tgt.gamma_t - ik.theta
    delta = ik.delta
    r_dot = tgt.v_t * math.cos(bearing) - ik.v * math.cos(delta)
    v_th = tgt.v_t * math.sin(bearing) - ik.v * math.sin(delta)
    return RelativeRates(
        r_dot=r_dot, theta_dot=v_th / ik.r, v_r=r_dot, v_theta=v_th
    )
