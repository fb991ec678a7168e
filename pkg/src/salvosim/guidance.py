"""Cooperative guidance commands and settling-time gain design.

Every law shares the structure a = nominal - shaping * U - compensation,
where U is the consensus input in the interception-time-error dynamics
(xi_dot = U - disturbance). U pushes each error toward its neighborhood
disagreement zeta_i = sum_j (xi_j - xi_i); the exponential form gives a
predefined settling deadline on fixed graphs, the power-sum edge form
gives it on switching graphs, and a plain positive gain gives a derived
fixed-time bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engagement import TargetModel

GRAV = 9.81

# Division guards. Below theta_dot_floor a deviated-pursuit command keeps
# only its nominal term (the interceptor is already on a collision
# triangle); below sin2delta_floor the stationary command is zero, and
# saturation turns the near-singular values just above the floor into a
# full-effort kick of the correct sign.
THETA_DOT_FLOOR = 1e-6
SIN2DELTA_FLOOR = 1e-4
OMEGA_EXP_CAP = 700.0
BOUNDARY_LAYER = 1e-3

LAWS = (
    "fixed_maneuvering",
    "fixed_constant",
    "fixed_stationary",
    "switch_fixedtime_maneuvering",
    "switch_fixedtime_stationary",
    "switch_predefined_maneuvering",
    "switch_predefined_constant",
    "switch_predefined_stationary",
    "pip_baseline",
)

DEVIATED_LAWS = (
    "fixed_maneuvering",
    "fixed_constant",
    "switch_fixedtime_maneuvering",
    "switch_predefined_maneuvering",
    "switch_predefined_constant",
)

STATIONARY_LAWS = (
    "fixed_stationary",
    "switch_fixedtime_stationary",
    "switch_predefined_stationary",
    "pip_baseline",
)


class GainConstraintError(ValueError):
    """Raised when a settling-time gain constraint is violated."""


class OmegaOverflowError(OverflowError):
    """Raised when the consensus function would overflow exp."""


def gamma_fn(x: float) -> float:
    """Euler gamma function on the positive reals."""
    if x <= 0.0:
        raise ValueError(f"gamma function restricted to x > 0, got {x}")
    return math.gamma(x)


def omega_exp(zeta_abs: float, c: float) -> float:
    """Exponential consensus function (1/c) exp(|z|^c) |z|^(2-c)."""
    if zeta_abs < 0.0:
        raise ValueError("zeta_abs must be nonnegative")
    if not 0.0 < c <= 1.0:
        raise GainConstraintError(f"exponent c must be in (0, 1], got {c}")
    powered = zeta_abs**c
    if powered > OMEGA_EXP_CAP:
        raise OmegaOverflowError(f"|zeta|^c = {powered} exceeds exp range")
    return math.exp(powered) * zeta_abs ** (2.0 - c) / c


def omega_composite(zeta: float, c: float) -> float:
    """Signed composite z^{-1} Omega(|z|) = sign(z)(1/c)exp(|z|^c)|z|^{1-c}.

    Defined as 0 at z = 0; the exp argument is capped so extreme initial
    spreads saturate the command instead of overflowing.
    """
    if not 0.0 < c <= 1.0:
        raise GainConstraintError(f"exponent c must be in (0, 1], got {c}")
    if zeta == 0.0:
        return 0.0
    az = abs(zeta)
    powered = min(az**c, OMEGA_EXP_CAP)
    return math.copysign(math.exp(powered) * az ** (1.0 - c) / c, zeta)


def _omega_composite_arr(zeta: np.ndarray, c: float) -> np.ndarray:
    az = np.abs(zeta)
    powered = np.minimum(az**c, OMEGA_EXP_CAP)
    out = np.exp(powered) * az ** (1.0 - c) / c
    return np.sign(zeta) * out


def saturate(a, a_max):
    """Clamp a command to [-a_max, +a_max]."""
    if np.any(np.asarray(a_max) <= 0):
        raise ValueError("a_max must be positive")
    return np.clip(a, -a_max, a_max)


def theorem_gain(lambda2: float, n: int, d: float, t_s: float) -> float:
    """Fixed-graph gain choice B = n^(2-d) / (lambda2 T_s) that turns the
    fixed-time bound into the predefined deadline T_s."""
    if lambda2 <= 0.0 or t_s <= 0.0 or n < 1 or d < 1.0:
        raise GainConstraintError("need lambda2, T_s > 0, n >= 1, d >= 1")
    return float(n) ** (2.0 - d) / (lambda2 * t_s)


def fixedtime_bound(b_min: float, lambda2: float, n: int, d: float) -> float:
    """Settling bound T_c = 1 / (B lambda2 (1/n)^(2-d)) for the plain-gain
    laws under arbitrary switching."""
    if b_min <= 0.0 or lambda2 <= 0.0 or n < 1:
        raise GainConstraintError("need B, lambda2 > 0 and n >= 1")
    beta = 1.0 / float(n)
    return 1.0 / (b_min * lambda2 * beta ** (2.0 - d))


def predefined_gain(
    t_s: float,
    m_coef: float,
    n_coef: float,
    m_exp: float,
    n_exp: float,
    k_exp: float,
    min_edges: int,
    min_lambda2: float,
) -> float:
    """Smallest admissible edge gain for the switching predefined-time laws.

    Gamma((1-km)/(n-m)) Gamma((kn-1)/(n-m)) / (T_s M^k Gamma(k)(n-m))
    * (M/N)^((1-km)/(n-m)) * (E_min / lambda2_min)
    """
    if k_exp * m_exp >= 1.0 or k_exp * n_exp <= 1.0:
        raise GainConstraintError(
            f"need k*m < 1 < k*n, got k*m={k_exp * m_exp}, k*n={k_exp * n_exp}"
        )
    if min(m_coef, n_coef, k_exp, m_exp, n_exp, t_s) <= 0.0:
        raise GainConstraintError("coefficients, exponents and T_s must be positive")
    if min_lambda2 <= 0.0 or min_edges < 1:
        raise GainConstraintError("need a connected family")
    dm = n_exp - m_exp
    num = gamma_fn((1.0 - k_exp * m_exp) / dm) * gamma_fn((k_exp * n_exp - 1.0) / dm)
    den = t_s * m_coef**k_exp * gamma_fn(k_exp) * dm
    ratio = (m_coef / n_coef) ** ((1.0 - k_exp * m_exp) / dm)
    return num / den * ratio * (min_edges / min_lambda2)


def epsilon_bound(r0: np.ndarray, v: np.ndarray, v_t: float, xi_max: float) -> float:
    """Robustness margin floor max_i r_i /(v_i^2 - v_T^2) * Xi_max, taken at
    the initial ranges (worst case, ranges shrink)."""
    r0 = np.asarray(r0, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.max(r0 / (v * v - v_t * v_t)) * xi_max)


def mu_bound(
    p_min: float,
    min_lambda2: float,
    r0: np.ndarray,
    v: np.ndarray,
    v_t: float,
    xi_max: float,
) -> float:
    """Margin floor for the switching maneuvering law."""
    if p_min <= 0.0 or min_lambda2 <= 0.0:
        raise GainConstraintError("need positive gain and connectivity")
    return epsilon_bound(r0, v, v_t, xi_max) / (p_min * math.sqrt(min_lambda2))


@dataclass(frozen=True)
class PipPoint:
    x: float
    y: float


def pip_coords(tgt: TargetModel, tgo: float) -> PipPoint:
    """Predicted interception point: target advanced along its heading by
    v_T * tgo. Collapses to the target position when tgo or v_T is zero."""
    if tgo < 0.0:
        raise ValueError("tgo must be nonnegative")
    lead = tgt.v_t * tgo
    return PipPoint(
        x=tgt.x + lead * math.cos(tgt.gamma_t),
        y=tgt.y + lead * math.sin(tgt.gamma_t),
    )


def range_on_consensus(delta: float, delta0: float, r0: float, nav_gain: float) -> float:
    """Closed-form range r(delta) along the post-consensus stationary-target
    trajectory starting from (r0, delta0).

    Obtained by partial fractions of d ln r / d u = -2u^2/((u-1)(u^2+u-(4N-2)))
    with u = cos(delta); the look angle reaches zero only at r = 0.
    """
    if nav_gain < 3.0:
        raise GainConstraintError(f"navigation gain must be >= 3, got {nav_gain}")
    if abs(delta) > abs(delta0):
        raise ValueError("post-consensus |delta| never exceeds |delta0|")
    if abs(delta0) >= math.pi / 2.0:
        raise ValueError("|delta0| must be below pi/2")
    if delta == 0.0:
        return 0.0
    big_k = 4.0 * nav_gain - 2.0
    root = math.sqrt(16.0 * nav_gain - 7.0)
    a_res = 1.0 / (2.0 * nav_gain - 2.0)
    sum_res = -(4.0 * nav_gain - 3.0) / (2.0 * (2.0 * nav_gain - 2.0))
    diff_res = -(4.0 * nav_gain - 1.0) / (2.0 * (2.0 * nav_gain - 2.0) * root)

    def log_terms(d: float) -> float:
        u = math.cos(d)
        quad = u * u + u - big_k
        ratio = abs(2.0 * u + 1.0 - root) / abs(2.0 * u + 1.0 + root)
        # |cos d - 1| written as 2 sin^2(d/2) to survive small angles
        return (
            a_res * (math.log(2.0) + 2.0 * math.log(abs(math.sin(0.5 * d))))
            + sum_res * math.log(abs(quad))
            + diff_res * math.log(ratio)
        )

    return r0 * math.exp(log_terms(delta) - log_terms(delta0))


@dataclass(frozen=True)
class GuidanceConfig:
    """Law selector plus every tunable of the guidance commands.

    Gains left as None are derived at scenario load: b_gain from the
    fixed-graph choice, p_gain from the switching settling condition,
    eps and mu from the disturbance margin with the configured xi_max.
    """

    law: str
    t_s: float = 5.0
    c: float = 0.0125
    d: float = 4.0
    b_gain: Optional[tuple[float, ...]] = None
    eps: Optional[float] = None
    p_gain: Optional[tuple[float, ...]] = None
    mu: Optional[float] = None
    m_coef: float = 1.0
    n_coef: float = 1.0
    m_exp: float = 0.1
    n_exp: float = 2.0
    k_exp: float = 2.0
    n_nav: float = 3.0
    a_max: float = 20.0 * GRAV
    xi_max: float = 0.5
    # Smooth the discontinuous sign terms with a narrow boundary layer.
    # With an exact sign, fixed-step integration chatters the eps/mu
    # robustness terms at +-full scale through the 1/(r^2 theta_dot)
    # shaping once the range shrinks, and the swarm misses by tens of
    # meters; the layer is far inside the consensus tolerance. Slow
    # actuators need a wider layer than the kinematic default, or the
    # sign relay and the fin lag settle into a joint limit cycle.
    sign_boundary_layer: bool = True
    bl_width: float = BOUNDARY_LAYER

    def __post_init__(self):
        if self.law not in LAWS:
            raise ValueError(f"unknown law {self.law!r}")
        if not 0.0 < self.c <= 1.0:
            raise GainConstraintError(f"exponent c must be in (0, 1], got {self.c}")
        if self.d < 1.0:
            raise GainConstraintError(f"scaling exponent d must be >= 1, got {self.d}")
        if self.t_s <= 0.0:
            raise GainConstraintError("T_s must be positive")
        if self.a_max <= 0.0:
            raise GainConstraintError("a_max must be positive")
        if self.law in STATIONARY_LAWS and self.n_nav < 3.0:
            raise GainConstraintError(f"navigation gain must be >= 3, got {self.n_nav}")
        if self.law.startswith("switch_predefined"):
            if self.k_exp * self.m_exp >= 1.0 or self.k_exp * self.n_exp <= 1.0:
                raise GainConstraintError(
                    "power-sum exponents must satisfy k*m < 1 < k*n"
                )


def _sgn(x: np.ndarray, smooth: bool, width: float = BOUNDARY_LAYER) -> np.ndarray:
    if smooth:
        return x / (np.abs(x) + width)
    return np.sign(x)


def consensus_input_exponential(
    zeta: np.ndarray,
    b_gain: np.ndarray,
    c: float,
    eps: float,
    smooth: bool = False,
    width: float = BOUNDARY_LAYER,
) -> np.ndarray:
    """U = B * zeta^{-1} Omega(|zeta|) + eps * sign(zeta).

    The signed composite keeps U aligned with zeta, which is what makes
    the disagreement Lyapunov function decrease; both terms vanish on
    the consensus manifold.
    """
    u = b_gain * _omega_composite_arr(zeta, c)
    if eps:
        u = u + eps * _sgn(zeta, smooth, width)
    return u


def consensus_input_edge_sum(
    tgo: np.ndarray,
    adjacency: np.ndarray,
    p_gain: np.ndarray,
    cfg: GuidanceConfig,
    mu: float,
    smooth: bool = False,
) -> np.ndarray:
    """U_i = P_i sum_j [(M|dji|^m + N|dji|^n)^k + mu] sign(dji) over the
    active neighborhood, dji = tgo_j - tgo_i."""
    diff = tgo[None, :] - tgo[:, None]
    mag = np.abs(diff)
    term = (cfg.m_coef * mag**cfg.m_exp + cfg.n_coef * mag**cfg.n_exp) ** cfg.k_exp
    if mu:
        term = term + mu
    contrib = adjacency * term * _sgn(diff, smooth, cfg.bl_width)
    return p_gain * contrib.sum(axis=1)


def shape_deviated(
    v: np.ndarray,
    v_t: float,
    r: np.ndarray,
    theta_dot: np.ndarray,
    delta: np.ndarray,
    bearing: np.ndarray,
    u: np.ndarray,
    a_hat: np.ndarray | None,
) -> np.ndarray:
    """Map the consensus input into a deviated-pursuit acceleration:
    a = v theta_dot - v(v^2-v_T^2)cos^2(delta)/(r^2 theta_dot) U
        - v sin(delta+bearing)cos(delta)/(r theta_dot) a_hat.

    The LOS-rate divisor is clamped away from zero with its sign kept
    (+ at exactly zero). An interceptor parked on a collision triangle
    then receives the saturated kick that rebuilds its LOS rate instead
    of coasting; zeroing the correction there would detach it from the
    consensus flow and bias the swarm's common time-to-go rate off -1,
    which compounds into a late-run steering runaway.
    """
    cos_d = np.cos(delta)
    nominal = v * theta_dot
    sign = np.where(theta_dot >= 0.0, 1.0, -1.0)
    td = sign * np.maximum(np.abs(theta_dot), THETA_DOT_FLOOR)
    a = nominal - v * (v * v - v_t * v_t) * cos_d * cos_d / (r * r * td) * u
    if a_hat is not None:
        a = a - v * np.sin(delta + bearing) * cos_d / (r * td) * a_hat
    return a


def shape_stationary(
    v: np.ndarray,
    r: np.ndarray,
    delta: np.ndarray,
    u: np.ndarray,
    nav_gain: np.ndarray,
) -> np.ndarray:
    """Map the consensus input into the stationary-target acceleration:
    a = v^2(4N-2)/(r sin 2delta) [U - 1 + cos(delta)(1 - sin^2(delta)/(4N-2))].

    sin(2 delta) is clamped away from zero with its sign kept (+ at
    exactly zero), so an interceptor sitting on the zero-look-angle
    knife edge still gets the saturated full-effort kick it needs to
    build a look angle; zeroing the command there instead would pin it
    at the uncontrollable point for the rest of the run. On the
    consensus manifold the bracket is O(delta^2), so the clamped command
    still vanishes smoothly at the terminal equilibrium.
    """
    den = 4.0 * nav_gain - 2.0
    sin_d = np.sin(delta)
    s2 = np.sin(2.0 * delta)
    bracket = u - 1.0 + np.cos(delta) * (1.0 - sin_d * sin_d / den)
    sign = np.where(s2 >= 0.0, 1.0, -1.0)
    s2_safe = sign * np.maximum(np.abs(s2), SIN2DELTA_FLOOR)
    return v * v * den / (r * s2_safe) * bracket


# Scalar wrappers for the per-law command contracts. The simulator calls
# the array forms directly.

def cmd_fixed_maneuvering(
    v: float,
    v_t: float,
    r: float,
    theta_dot: float,
    delta: float,
    bearing: float,
    zeta: float,
    a_hat: float,
    cfg: GuidanceConfig,
    lambda2: float,
    n: int,
) -> float:
    b = np.asarray(cfg.b_gain if cfg.b_gain else theorem_gain(lambda2, n, cfg.d, cfg.t_s))
    u = consensus_input_exponential(
        np.asarray([zeta]), b, cfg.c, cfg.eps or 0.0, cfg.sign_boundary_layer
    )
    return float(
        shape_deviated(
            np.asarray([v]), v_t, np.asarray([r]), np.asarray([theta_dot]),
            np.asarray([delta]), np.asarray([bearing]), u, np.asarray([a_hat]),
        )[0]
    )


def cmd_fixed_constant(
    v: float,
    v_t: float,
    r: float,
    theta_dot: float,
    delta: float,
    zeta: float,
    cfg: GuidanceConfig,
    lambda2: float,
    n: int,
) -> float:
    b = np.asarray(cfg.b_gain if cfg.b_gain else theorem_gain(lambda2, n, cfg.d, cfg.t_s))
    u = consensus_input_exponential(np.asarray([zeta]), b, cfg.c, 0.0)
    return float(
        shape_deviated(
            np.asarray([v]), v_t, np.asarray([r]), np.asarray([theta_dot]),
            np.asarray([delta]), np.asarray([0.0]), u, None,
        )[0]
    )


def cmd_fixed_stationary(
    v: float,
    r: float,
    delta: float,
    zeta: float,
    cfg: GuidanceConfig,
    lambda2: float,
    n: int,
) -> float:
    b = np.asarray(cfg.b_gain if cfg.b_gain else theorem_gain(lambda2, n, cfg.d, cfg.t_s))
    u = consensus_input_exponential(np.asarray([zeta]), b, cfg.c, 0.0)
    return float(
        shape_stationary(
            np.asarray([v]), np.asarray([r]), np.asarray([delta]), u,
            np.asarray([cfg.n_nav]),
        )[0]
    )
