"""Dual-controlled interceptor plant: canard/tail deflections through
first-order lags driving short-period pitch dynamics.

The aero model is affine in (alpha, q, delta_c, delta_t). The default
coefficients are engine-chosen so the closed inner loop tracks a 20 g
step within a second; they are not published values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AirframeParams:
    mass: float = 100.0
    inertia: float = 50.0
    tau_c: float = 0.02
    tau_t: float = 0.02
    lift_alpha: float = 90000.0
    lift_canard: float = 12000.0
    lift_tail: float = 6000.0
    moment_alpha: float = -15000.0
    moment_q: float = -150.0
    moment_canard: float = 12500.0
    moment_tail: float = -10000.0
    alpha_gain: float = 12.0
    q_gain: float = 30.0
    canard_share: float = 0.5
    deflection_limit: float = math.radians(30.0)

    def __post_init__(self):
        if min(self.mass, self.inertia, self.tau_c, self.tau_t) <= 0.0:
            raise ValueError("mass, inertia and fin time constants must be positive")
        if not 0.0 <= self.canard_share <= 1.0:
            raise ValueError("canard_share must be in [0, 1]")


@dataclass(frozen=True)
class AirframeState:
    alpha: float = 0.0
    q: float = 0.0
    pitch: float = 0.0
    delta_c: float = 0.0
    delta_t: float = 0.0


def firstorder_lag_step(x: float, setpoint: float, tau: float, dt: float) -> float:
    """Exact discretization of x_dot = (setpoint - x)/tau over one step."""
    if tau <= 0.0 or dt <= 0.0:
        raise ValueError("tau and dt must be positive")
    return x + (setpoint - x) * (1.0 - math.exp(-dt / tau))


def _setpoints(s_arr: np.ndarray, a_cmd: np.ndarray, p: AirframeParams, v: float):
    """Proportional inner loop: acceleration -> alpha -> pitch rate -> fin
    moment split between canard and tail."""
    alpha, q = s_arr[:, 0], s_arr[:, 1]
    dc, dtl = s_arr[:, 3], s_arr[:, 4]
    alpha_ref = (a_cmd * p.mass - p.lift_canard * dc - p.lift_tail * dtl) / p.lift_alpha
    q_ref = p.alpha_gain * (alpha_ref - alpha) + a_cmd / v
    fin_moment = (
        p.inertia * p.q_gain * (q_ref - q) - p.moment_alpha * alpha - p.moment_q * q
    )
    dc_ref = p.canard_share * fin_moment / p.moment_canard
    dt_ref = (1.0 - p.canard_share) * fin_moment / p.moment_tail
    lim = p.deflection_limit
    return np.clip(dc_ref, -lim, lim), np.clip(dt_ref, -lim, lim)


def airframe_step_arrays(
    s_arr: np.ndarray, a_cmd: np.ndarray, p: AirframeParams, v: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Advance (alpha, q, pitch, delta_c, delta_t) rows one step; returns the
    new states and realized accelerations L/m.

    Fins follow their exact exponential lag; the pitch states take one
    RK4 step with the fin trajectories evaluated at the stage times.
    """
    dc_ref, dt_ref = _setpoints(s_arr, a_cmd, p, v)
    dc0, dt0 = s_arr[:, 3], s_arr[:, 4]

    def fins_at(h: float):
        return (
            dc_ref + (dc0 - dc_ref) * math.exp(-h / p.tau_c),
            dt_ref + (dt0 - dt_ref) * math.exp(-h / p.tau_t),
        )

    def rates(y: np.ndarray, h: float) -> np.ndarray:
        alpha, q = y[:, 0], y[:, 1]
        dc, dtl = fins_at(h)
        lift = p.lift_alpha * alpha + p.lift_canard * dc + p.lift_tail * dtl
        moment = (
            p.moment_alpha * alpha
            + p.moment_q * q
            + p.moment_canard * dc
            + p.moment_tail * dtl
        )
        out = np.empty_like(y)
        out[:, 0] = q - lift / (p.mass * v)
        out[:, 1] = moment / p.inertia
        out[:, 2] = q
        return out

    y = s_arr[:, :3]
    k1 = rates(y, 0.0)
    k2 = rates(y + 0.5 * dt * k1, 0.5 * dt)
    k3 = rates(y + 0.5 * dt * k2, 0.5 * dt)
    k4 = rates(y + dt * k3, dt)
    y_new = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    out = np.empty_like(s_arr)
    out[:, :3] = y_new
    out[:, 3], out[:, 4] = fins_at(dt)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("airframe state became non-finite")
    a_real = (
        p.lift_alpha * out[:, 0]
        + p.lift_canard * out[:, 3]
        + p.lift_tail * out[:, 4]
    ) / p.mass
    return out, a_real


def airframe_step(
    s: AirframeState, a_cmd: float, p: AirframeParams, v: float, dt: float
) -> tuple[AirframeState, float]:
    """Single-vehicle wrapper around the array step."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    arr = np.array([[s.alpha, s.q, s.pitch, s.delta_c, s.delta_t]])
    out, a_real = airframe_step_arrays(arr, np.array([a_cmd]), p, v, dt)
    new = AirframeState(
        alpha=float(out[0, 0]),
        q=float(out[0, 1]),
        pitch=float(out[0, 2]),
        delta_c=float(out[0, 3]),
        delta_t=float(out[0, 4]),
    )
    return new, float(a_real[0])
