"""Time-to-go estimators, consensus-error bookkeeping, and the target
maneuver observer.

The observer runs the same three-stage finite-time structure on the two
relative-velocity channels of an interceptor (transverse and radial),
both scaled by the initial range so the published gain set applies at
engagement scale, and recombines the per-channel disturbance estimates
along the known bearing. This avoids the cos(gamma_T - theta) = 0
output singularity a single transverse channel would have.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .network import Topology, neighborhood


class InvalidSpeedOrderingError(ValueError):
    """Raised when an interceptor is not faster than the target."""


class InvalidGainError(ValueError):
    """Raised for navigation gains outside their admissible range."""


def tgo_deviated(
    r: float, delta: float, theta: float, gamma_t: float, v: float, v_t: float
) -> float:
    """Time-to-go under deviated pursuit with a fixed look angle.

    r * sec(delta) * [v + v_T cos(gamma_T - theta + delta)] / (v^2 - v_T^2);
    zero iff r is zero.
    """
    if v <= v_t or v_t < 0.0:
        raise InvalidSpeedOrderingError(f"need v > v_T >= 0, got v={v}, v_T={v_t}")
    num = v + v_t * math.cos(gamma_t - theta + delta)
    return r * num / (math.cos(delta) * (v * v - v_t * v_t))


def tgo_stationary(r: float, delta: float, v: float, nav_gain: float) -> float:
    """Time-to-go against a stationary target: (r/v)(1 + sin^2(delta)/(4N-2))."""
    if v <= 0.0:
        raise ValueError(f"speed must be positive, got {v}")
    if nav_gain < 3.0:
        raise InvalidGainError(f"navigation gain must be >= 3, got {nav_gain}")
    s = math.sin(delta)
    return (r / v) * (1.0 + s * s / (4.0 * nav_gain - 2.0))


def disagreement(tgos: "np.ndarray | list[float]", g: Topology, i: int) -> float:
    """Neighborhood disagreement zeta_i = sum_{j in N_i} (tgo_j - tgo_i).

    Equals the disagreement in interception-time errors because the
    common interception time cancels in the differences.
    """
    arr = np.asarray(tgos, dtype=float)
    if arr.shape != (g.n,):
        raise ValueError(f"expected {g.n} time-to-go values, got shape {arr.shape}")
    return float(sum(arr[j - 1] - arr[i - 1] for j in sorted(neighborhood(g, i))))


def disagreement_vector(tgos: np.ndarray, lap: np.ndarray) -> np.ndarray:
    """All zeta_i at once: zeta = -L @ tgo."""
    return -(lap @ tgos)


@dataclass(frozen=True)
class ObserverGains:
    """Gains of the three-stage observer; orderings g2>g1>g0>0, h2>h1>h0>0.

    f_bound caps the rate of the scaled disturbance channel seen by the
    sliding terms.
    """

    g0: float = 0.01
    g1: float = 0.05
    g2: float = 1.30
    h0: float = 0.005
    h1: float = 3.25
    h2: float = 3.3
    f_bound: float = 0.1

    def __post_init__(self):
        if not (self.g2 > self.g1 > self.g0 > 0.0):
            raise InvalidGainError("need g2 > g1 > g0 > 0")
        if not (self.h2 > self.h1 > self.h0 > 0.0):
            raise InvalidGainError("need h2 > h1 > h0 > 0")
        if self.f_bound <= 0.0:
            raise InvalidGainError("f_bound must be positive")


@dataclass(frozen=True)
class ObserverState:
    """States of the two observer channels plus the fixed range scale.

    w0 tracks the scaled transverse relative speed (the measured LOS
    rate at t = 0 when r_ref = r(0)), w1 is the scaled transverse
    disturbance estimate, w2 its rate; the *_r triple is the radial
    channel. The fused maneuver estimate is
    a_hat = r_ref * (cos(bearing) * w1 - sin(bearing) * w1_r).
    """

    gains: ObserverGains
    r_ref: float
    w0: float = 0.0
    w1: float = 0.0
    w2: float = 0.0
    w0_r: float = 0.0
    w1_r: float = 0.0
    w2_r: float = 0.0

    @classmethod
    def at_measurement(
        cls,
        gains: ObserverGains,
        r: float,
        theta_dot: float,
        r_dot: float,
    ) -> "ObserverState":
        """Start with w0 at the measured rates so there is no initial jump."""
        return cls(gains=gains, r_ref=r, w0=theta_dot, w0_r=r_dot / r)

    def a_hat(self, bearing: float) -> float:
        return self.r_ref * (
            math.cos(bearing) * self.w1 - math.sin(bearing) * self.w1_r
        )


def _stage_rates(w0, w1, w2, e0, gains: ObserverGains, f13, f12):
    """Correction chain shared by both channels; returns (v0, w1_dot, w2_dot)."""
    v0 = -gains.g2 * f13 * np.abs(e0) ** (2.0 / 3.0) * np.sign(e0) - gains.h2 * e0 + w1
    e1 = w1 - v0
    v1 = -gains.g1 * f12 * np.abs(e1) ** 0.5 * np.sign(e1) - gains.h1 * e1 + w2
    e2 = w2 - v1
    w2_dot = -gains.g0 * gains.f_bound * np.sign(e2) - gains.h0 * e2
    return v0, v1, w2_dot


def observer_step_arrays(
    w: np.ndarray,
    r_ref: np.ndarray,
    theta_dot: np.ndarray,
    r: np.ndarray,
    r_dot: np.ndarray,
    delta: np.ndarray,
    a_real: np.ndarray,
    bearing: np.ndarray,
    gains: ObserverGains,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One explicit-Euler step of the observer for a whole swarm.

    w has shape (n, 6): columns (w0, w1, w2, w0_r, w1_r, w2_r). Returns
    the advanced states and the fused maneuver estimates.
    """
    f13 = gains.f_bound ** (1.0 / 3.0)
    f12 = gains.f_bound**0.5
    v_th = r * theta_dot
    v_r = r_dot
    cos_d, sin_d = np.cos(delta), np.sin(delta)
    cos_b, sin_b = np.cos(bearing), np.sin(bearing)

    # transverse channel: d/dt(v_theta / r_ref) driven by cos(bearing) a_T / r_ref
    f_a = v_th / r_ref
    known_a = (-v_r * v_th / r - cos_d * a_real) / r_ref
    v0a, w1a_dot, w2a_dot = _stage_rates(
        w[:, 0], w[:, 1], w[:, 2], w[:, 0] - f_a, gains, f13, f12
    )
    # radial channel: d/dt(v_r / r_ref) driven by -sin(bearing) a_T / r_ref
    f_b = v_r / r_ref
    known_b = (v_th * v_th / r + sin_d * a_real) / r_ref
    v0b, w1b_dot, w2b_dot = _stage_rates(
        w[:, 3], w[:, 4], w[:, 5], w[:, 3] - f_b, gains, f13, f12
    )

    out = np.empty_like(w)
    out[:, 0] = w[:, 0] + dt * (known_a + v0a)
    out[:, 1] = w[:, 1] + dt * w1a_dot
    out[:, 2] = w[:, 2] + dt * w2a_dot
    out[:, 3] = w[:, 3] + dt * (known_b + v0b)
    out[:, 4] = w[:, 4] + dt * w1b_dot
    out[:, 5] = w[:, 5] + dt * w2b_dot
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("observer state became non-finite")
    a_hat = r_ref * (cos_b * out[:, 1] - sin_b * out[:, 4])
    return out, a_hat


def observer_step(
    s: ObserverState,
    theta_dot_meas: float,
    r: float,
    r_dot: float,
    delta: float,
    a_real: float,
    bearing: float,
    dt: float,
) -> tuple[ObserverState, float]:
    """Advance one interceptor's observer one step; returns the new state
    and the fused target-maneuver estimate."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    w = np.array([[s.w0, s.w1, s.w2, s.w0_r, s.w1_r, s.w2_r]])
    out, a_hat = observer_step_arrays(
        w,
        np.array([s.r_ref]),
        np.array([theta_dot_meas]),
        np.array([r]),
        np.array([r_dot]),
        np.array([delta]),
        np.array([a_real]),
        np.array([bearing]),
        s.gains,
        dt,
    )
    new = replace(
        s,
        w0=float(out[0, 0]),
        w1=float(out[0, 1]),
        w2=float(out[0, 2]),
        w0_r=float(out[0, 3]),
        w1_r=float(out[0, 4]),
        w2_r=float(out[0, 5]),
    )
    return new, float(a_hat[0])


class SingularLosRateError(ValueError):
    """Raised when the deviated-pursuit rate expression divides by ~zero."""


def xi_rate_deviated(
    r: float,
    theta_dot: float,
    delta: float,
    bearing: float,
    v: float,
    v_t: float,
    a_i: float,
    a_t: float,
) -> float:
    """Analytic rate of the interception-time error for the deviated law.

    Used only as a gradient-check diagnostic for the time-to-go
    implementation; requires a nonzero LOS rate.
    """
    if abs(theta_dot) < 1e-9:
        raise SingularLosRateError("LOS rate below 1e-9")
    sec2 = 1.0 / math.cos(delta) ** 2
    dv2 = v * v - v_t * v_t
    term1 = r * r * theta_dot * theta_dot * sec2 / dv2
    term2 = r * r * theta_dot * sec2 / (v * dv2) * a_i
    term3 = r * math.sin(delta + bearing) / (dv2 * math.cos(delta)) * a_t
    return term1 - term2 - term3


def xi_rate_stationary(
    r: float, delta: float, v: float, nav_gain: float, a_i: float
) -> float:
    """Analytic error rate for the stationary-target law."""
    if nav_gain < 3.0:
        raise InvalidGainError(f"navigation gain must be >= 3, got {nav_gain}")
    den = 4.0 * nav_gain - 2.0
    s = math.sin(delta)
    return (
        1.0
        - math.cos(delta) * (1.0 - s * s / den)
        + r * math.sin(2.0 * delta) / (v * v * den) * a_i
    )


def xi_rate_diagnostic(ik, tgt, a_i: float, a_t: float, law: str, nav_gain: float = 3.0) -> float:
    """Analytic interception-time-error rate for either law family,
    evaluated on an engagement state (gradient-check diagnostic only)."""
    from .engagement import relative_rates

    if law == "stationary":
        return xi_rate_stationary(ik.r, ik.delta, ik.v, nav_gain, a_i)
    if law == "deviated_pursuit":
        rates = relative_rates(ik, tgt)
        return xi_rate_deviated(
            ik.r, rates.theta_dot, ik.delta, tgt.gamma_t - ik.theta,
            ik.v, tgt.v_t, a_i, a_t,
        )
    raise ValueError(f"unknown law family {law!r}")
