"""Fixed-step closed-loop integration of the full swarm.

Smooth kinematics advance by classical RK4 with the commands held
constant over the step; the observer uses its own Euler step and the
fin lags their exact exponential step at the same cadence. Captured
interceptors are frozen rather than removed so the log stays
rectangular, and the capture instant is interpolated linearly between
the straddling samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import guidance as gd
from .airframe import AirframeParams, airframe_step_arrays
from .engagement import TargetModel
from .estimation import ObserverGains, observer_step_arrays
from .network import SwitchingSchedule, spectral_summary

PIP_TOL = 1e-12
PIP_MAX_ITER = 60


class SimulationDivergenceError(RuntimeError):
    """A state became non-finite; carries the last consistent time."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class GuidanceResolved:
    """GuidanceConfig with every derived gain filled in as arrays."""

    cfg: gd.GuidanceConfig
    b_gain: np.ndarray
    p_gain: np.ndarray
    n_nav: np.ndarray
    eps: float
    mu: float
    lambda2: float
    min_lambda2: float
    min_edges: int


def resolve_gains(
    cfg: gd.GuidanceConfig,
    network: SwitchingSchedule,
    r0: np.ndarray,
    v: np.ndarray,
    v_t: float,
) -> tuple[GuidanceResolved, list[str]]:
    """Fill omitted gains from the settling-time conditions and validate
    explicit values against them. Returns the resolved record plus
    warning strings for any explicit value below its bound."""
    warnings: list[str] = []
    n = len(r0)
    spec = spectral_summary(network)
    lam2, lam2_min, e_min = spec.lambda2, spec.min_lambda2_family, spec.min_edges_family

    def per_agent(value, default):
        if value is None:
            return np.full(n, float(default))
        arr = np.asarray(value, dtype=float)
        return np.full(n, float(arr)) if arr.ndim == 0 else arr.copy()

    fixed_graph_law = cfg.law.startswith("fixed") or cfg.law == "pip_baseline"
    b_default = gd.theorem_gain(lam2 if fixed_graph_law else lam2_min, n, cfg.d, cfg.t_s)
    b_gain = per_agent(cfg.b_gain, b_default)

    if cfg.law.startswith("switch_predefined"):
        p_min = gd.predefined_gain(
            cfg.t_s, cfg.m_coef, cfg.n_coef, cfg.m_exp, cfg.n_exp, cfg.k_exp,
            e_min, lam2_min,
        )
    else:
        p_min = 1.0
    p_gain = per_agent(cfg.p_gain, p_min)
    if cfg.p_gain is not None and float(np.min(p_gain)) < p_min * (1.0 - 1e-9):
        warnings.append(
            f"p_gain {np.min(p_gain):.4g} below the settling condition {p_min:.4g}"
        )

    eps_min = gd.epsilon_bound(r0, v, v_t, cfg.xi_max)
    mu_min = gd.mu_bound(float(np.min(p_gain)), lam2_min, r0, v, v_t, cfg.xi_max)
    needs_eps = cfg.law in ("fixed_maneuvering", "switch_fixedtime_maneuvering")
    needs_mu = cfg.law == "switch_predefined_maneuvering"
    eps = cfg.eps if cfg.eps is not None else (1.05 * eps_min if needs_eps else 0.0)
    mu = cfg.mu if cfg.mu is not None else (1.05 * mu_min if needs_mu else 0.0)
    if needs_eps and eps < eps_min:
        warnings.append(f"eps {eps:.4g} below the disturbance margin {eps_min:.4g}")
    if needs_mu and mu < mu_min:
        warnings.append(f"mu {mu:.4g} below the disturbance margin {mu_min:.4g}")

    resolved = GuidanceResolved(
        cfg=cfg,
        b_gain=b_gain,
        p_gain=p_gain,
        n_nav=np.full(n, cfg.n_nav),
        eps=float(eps),
        mu=float(mu),
        lambda2=lam2,
        min_lambda2=lam2_min,
        min_edges=e_min,
    )
    return resolved, warnings


@dataclass(frozen=True)
class Scenario:
    """Complete description of one engagement run."""

    r0: tuple[float, ...]
    theta0: tuple[float, ...]
    gamma0: tuple[float, ...]
    v: tuple[float, ...]
    target: TargetModel
    network: SwitchingSchedule
    guidance: GuidanceResolved
    observer: ObserverGains = field(default_factory=ObserverGains)
    airframe: Optional[AirframeParams] = None
    dt: float = 1e-3
    t_max: float = 60.0
    capture_radius: float = 1.0
    spread_tol: float = 0.1
    seed: int = 0
    name: str = "scenario"

    @property
    def n(self) -> int:
        return len(self.r0)

    def __post_init__(self):
        n = len(self.r0)
        if n < 2:
            raise ValueError("need at least two interceptors")
        for attr in ("theta0", "gamma0", "v"):
            if len(getattr(self, attr)) != n:
                raise ValueError(f"{attr} must have {n} entries")
        if self.dt <= 0.0 or self.t_max <= 0.0 or self.capture_radius <= 0.0:
            raise ValueError("dt, t_max and capture_radius must be positive")
        if any(r <= 0.0 for r in self.r0):
            raise ValueError("initial ranges must be positive")
        if any(v <= self.target.v_t for v in self.v):
            raise ValueError("every interceptor must outrun the target")
        if self.network.graphs[0].n != n:
            raise ValueError("network vertex count must match the swarm size")


def _adjacency(g) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for i, j in g.edges:
        a[i - 1, j - 1] = 1.0
        a[j - 1, i - 1] = 1.0
    return a


def _wrap_pi(x: np.ndarray) -> np.ndarray:
    out = np.mod(np.asarray(x) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(out == -np.pi, np.pi, out)


@dataclass
class World:
    """Mutable integration state for one run."""

    sc: Scenario
    r: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray
    v: np.ndarray
    tgt_x: float
    tgt_y: float
    tgt_gamma: float
    alive: np.ndarray
    capture_time: np.ndarray
    obs_w: np.ndarray
    obs_ref: np.ndarray
    air: Optional[np.ndarray]
    adjacency: tuple[np.ndarray, ...]
    pip_tau: np.ndarray
    out_tgo: np.ndarray
    out_a_cmd: np.ndarray
    out_a_real: np.ndarray
    out_a_hat: np.ndarray
    out_topo: int


def make_world(sc: Scenario) -> World:
    n = sc.n
    r = np.asarray(sc.r0, dtype=float).copy()
    theta = np.asarray(sc.theta0, dtype=float).copy()
    gamma = np.asarray(sc.gamma0, dtype=float).copy()
    v = np.asarray(sc.v, dtype=float).copy()
    delta = _wrap_pi(gamma - theta)
    bearing = sc.target.gamma_t - theta
    v_th = sc.target.v_t * np.sin(bearing) - v * np.sin(delta)
    v_r = sc.target.v_t * np.cos(bearing) - v * np.cos(delta)
    obs_w = np.zeros((n, 6))
    obs_w[:, 0] = v_th / r
    obs_w[:, 3] = v_r / r
    tgo0 = _tgo_for_law(sc.guidance.cfg, r, delta, theta, v, sc.target, sc.target.gamma_t)
    return World(
        sc=sc,
        r=r,
        theta=theta,
        gamma=gamma,
        v=v,
        tgt_x=sc.target.x,
        tgt_y=sc.target.y,
        tgt_gamma=sc.target.gamma_t,
        alive=np.ones(n, dtype=bool),
        capture_time=np.full(n, np.nan),
        obs_w=obs_w,
        obs_ref=r.copy(),
        air=np.zeros((n, 5)) if sc.airframe is not None else None,
        adjacency=tuple(_adjacency(g) for g in sc.network.graphs),
        pip_tau=tgo0.copy(),
        out_tgo=tgo0.copy(),
        out_a_cmd=np.zeros(n),
        out_a_real=np.zeros(n),
        out_a_hat=np.zeros(n),
        out_topo=sc.network.active_index(0.0),
    )


def _tgo_for_law(cfg, r, delta, theta, v, tgt, gamma_t) -> np.ndarray:
    if cfg.law in gd.DEVIATED_LAWS:
        num = v + tgt.v_t * np.cos(gamma_t - theta + delta)
        return r * num / (np.cos(delta) * (v * v - tgt.v_t**2))
    den = 4.0 * cfg.n_nav - 2.0
    s = np.sin(delta)
    return (r / v) * (1.0 + s * s / den)


def _pip_geometry(world: World):
    """Self-consistent virtual-stationary time-to-go toward the predicted
    interception point, warm-started from the previous step."""
    sc = world.sc
    den = 4.0 * sc.guidance.cfg.n_nav - 2.0
    dirx, diry = math.cos(world.tgt_gamma), math.sin(world.tgt_gamma)
    pos_x = world.tgt_x - world.r * np.cos(world.theta)
    pos_y = world.tgt_y - world.r * np.sin(world.theta)
    tau = world.pip_tau
    for _ in range(PIP_MAX_ITER):
        px = world.tgt_x + sc.target.v_t * tau * dirx
        py = world.tgt_y + sc.target.v_t * tau * diry
        rx, ry = px - pos_x, py - pos_y
        r_v = np.hypot(rx, ry)
        th_v = np.arctan2(ry, rx)
        de_v = _wrap_pi(world.gamma - th_v)
        new = (r_v / world.v) * (1.0 + np.sin(de_v) ** 2 / den)
        done = np.max(np.abs(new - tau)) < PIP_TOL
        tau = new
        if done:
            break
    world.pip_tau = tau
    return tau, r_v, de_v


def compute_outputs(world: World, t: float) -> None:
    """Evaluate time-to-go, the consensus input, and the commanded and
    saturated accelerations at time t, stashing them on the world."""
    sc = world.sc
    gains = sc.guidance
    cfg = gains.cfg
    alive = world.alive
    v = world.v
    v_t = sc.target.v_t

    delta = _wrap_pi(world.gamma - world.theta)
    bearing = world.tgt_gamma - world.theta
    theta_dot = (v_t * np.sin(bearing) - v * np.sin(delta)) / world.r

    topo_idx = sc.network.active_index(t)
    adj = world.adjacency[topo_idx - 1] * alive[None, :] * alive[:, None]

    if cfg.law == "pip_baseline":
        tgo, r_eff, de_eff = _pip_geometry(world)
    else:
        tgo = _tgo_for_law(cfg, world.r, delta, world.theta, v, sc.target, world.tgt_gamma)
        r_eff, de_eff = world.r, delta

    zeta = adj @ tgo - adj.sum(axis=1) * tgo

    a_hat = np.zeros(sc.n)
    if sc.target.kind == "maneuvering" and cfg.law in (
        "fixed_maneuvering",
        "switch_fixedtime_maneuvering",
        "switch_predefined_maneuvering",
    ):
        a_hat = world.obs_ref * (
            np.cos(bearing) * world.obs_w[:, 1] - np.sin(bearing) * world.obs_w[:, 4]
        )

    smooth = cfg.sign_boundary_layer
    width = cfg.bl_width
    if cfg.law in ("fixed_maneuvering", "switch_fixedtime_maneuvering"):
        u = gd.consensus_input_exponential(
            zeta, gains.b_gain, cfg.c, gains.eps, smooth, width
        )
        a_cmd = gd.shape_deviated(v, v_t, world.r, theta_dot, delta, bearing, u, a_hat)
    elif cfg.law == "fixed_constant":
        u = gd.consensus_input_exponential(zeta, gains.b_gain, cfg.c, 0.0, smooth)
        a_cmd = gd.shape_deviated(v, v_t, world.r, theta_dot, delta, bearing, u, None)
    elif cfg.law in ("fixed_stationary", "switch_fixedtime_stationary"):
        u = gd.consensus_input_exponential(zeta, gains.b_gain, cfg.c, 0.0, smooth)
        a_cmd = gd.shape_stationary(v, world.r, delta, u, gains.n_nav)
    elif cfg.law in ("switch_predefined_maneuvering", "switch_predefined_constant"):
        mu = gains.mu if cfg.law == "switch_predefined_maneuvering" else 0.0
        u = gd.consensus_input_edge_sum(tgo, adj, gains.p_gain, cfg, mu, smooth)
        a_hat_arg = a_hat if cfg.law == "switch_predefined_maneuvering" else None
        a_cmd = gd.shape_deviated(v, v_t, world.r, theta_dot, delta, bearing, u, a_hat_arg)
    elif cfg.law == "switch_predefined_stationary":
        u = gd.consensus_input_edge_sum(tgo, adj, gains.p_gain, cfg, 0.0, smooth)
        a_cmd = gd.shape_stationary(v, world.r, delta, u, gains.n_nav)
    elif cfg.law == "pip_baseline":
        u = gd.consensus_input_exponential(zeta, gains.b_gain, cfg.c, 0.0, smooth)
        a_cmd = gd.shape_stationary(v, r_eff, de_eff, u, gains.n_nav)
    else:  # pragma: no cover
        raise ValueError(f"unhandled law {cfg.law}")

    world.out_tgo = np.where(alive, tgo, world.out_tgo)
    world.out_a_cmd = np.where(alive, a_cmd, 0.0)
    world.out_a_hat = a_hat
    world.out_topo = topo_idx


def step(world: World, t: float, dt: float) -> World:
    """Advance the world from t to t + dt with zero-order-hold commands."""
    sc = world.sc
    alive = world.alive
    v = world.v
    v_t = sc.target.v_t

    compute_outputs(world, t)
    a_sat = gd.saturate(world.out_a_cmd, sc.guidance.cfg.a_max)

    if world.air is not None:
        world.air, a_real = airframe_step_arrays(world.air, a_sat, sc.airframe, v, dt)
        a_real = np.where(alive, a_real, 0.0)
    else:
        a_real = a_sat
    world.out_a_real = a_real

    if sc.target.kind == "maneuvering":
        delta = _wrap_pi(world.gamma - world.theta)
        bearing = world.tgt_gamma - world.theta
        v_r = v_t * np.cos(bearing) - v * np.cos(delta)
        theta_dot = (v_t * np.sin(bearing) - v * np.sin(delta)) / world.r
        world.obs_w, _ = observer_step_arrays(
            world.obs_w, world.obs_ref, theta_dot, world.r, v_r, delta, a_real,
            bearing, sc.observer, dt,
        )

    accel = sc.target.accel
    gamma_dot = np.where(alive, a_real / v, 0.0)
    r0, th0, ga0 = world.r, world.theta, world.gamma
    gt0 = world.tgt_gamma

    def deriv(r, th, ga, g_t, tt):
        de = ga - th
        br = g_t - th
        rd = np.where(alive, v_t * np.cos(br) - v * np.cos(de), 0.0)
        thd = np.where(alive, (v_t * np.sin(br) - v * np.sin(de)) / r, 0.0)
        gtd = accel(tt) / v_t if v_t > 0.0 else 0.0
        return rd, thd, gtd

    k1 = deriv(r0, th0, ga0, gt0, t)
    k2 = deriv(
        r0 + 0.5 * dt * k1[0], th0 + 0.5 * dt * k1[1], ga0 + 0.5 * dt * gamma_dot,
        gt0 + 0.5 * dt * k1[2], t + 0.5 * dt,
    )
    k3 = deriv(
        r0 + 0.5 * dt * k2[0], th0 + 0.5 * dt * k2[1], ga0 + 0.5 * dt * gamma_dot,
        gt0 + 0.5 * dt * k2[2], t + 0.5 * dt,
    )
    k4 = deriv(
        r0 + dt * k3[0], th0 + dt * k3[1], ga0 + dt * gamma_dot,
        gt0 + dt * k3[2], t + dt,
    )

    r_new = r0 + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    world.theta = th0 + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    world.gamma = ga0 + dt * gamma_dot
    gt_new = gt0 + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    if v_t > 0.0:
        # target position: exact quadrature of its (possibly turning) path
        world.tgt_x += dt / 6.0 * v_t * (
            math.cos(gt0)
            + 2.0 * math.cos(gt0 + 0.5 * dt * k1[2])
            + 2.0 * math.cos(gt0 + 0.5 * dt * k2[2])
            + math.cos(gt0 + dt * k3[2])
        )
        world.tgt_y += dt / 6.0 * v_t * (
            math.sin(gt0)
            + 2.0 * math.sin(gt0 + 0.5 * dt * k1[2])
            + 2.0 * math.sin(gt0 + 0.5 * dt * k2[2])
            + math.sin(gt0 + dt * k3[2])
        )
    world.tgt_gamma = gt_new

    if not (
        np.all(np.isfinite(r_new))
        and np.all(np.isfinite(world.theta))
        and np.all(np.isfinite(world.gamma))
        and math.isfinite(world.tgt_gamma)
    ):
        raise SimulationDivergenceError("kinematic state became non-finite", t)

    crossed = alive & (r_new < sc.capture_radius)
    if np.any(crossed):
        frac = (r0[crossed] - sc.capture_radius) / (r0[crossed] - r_new[crossed])
        world.capture_time[crossed] = t + dt * frac
        world.alive = alive & ~crossed
    world.r = r_new
    return world


@dataclass
class SimLog:
    """Time-indexed engagement record plus derived events."""

    t: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    tgo: np.ndarray
    a_cmd: np.ndarray
    a_real: np.ndarray
    a_hat: np.ndarray
    x: np.ndarray
    y: np.ndarray
    target_x: np.ndarray
    target_y: np.ndarray
    topo: np.ndarray
    xi_spread: np.ndarray
    capture_times: np.ndarray
    consensus_time: Optional[float]
    t_f: Optional[float]
    scenario: Scenario

    @property
    def n(self) -> int:
        return self.r.shape[1]

    @property
    def all_captured(self) -> bool:
        return bool(np.all(np.isfinite(self.capture_times)))

    @property
    def capture_spread(self) -> float:
        return float(np.nanmax(self.capture_times) - np.nanmin(self.capture_times))


def consensus_time_of(
    t: np.ndarray, spread: np.ndarray, capture_times: np.ndarray, tol: float
) -> Optional[float]:
    """First instant after which the time-to-go spread stays within tol
    until the first capture; None if never achieved."""
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    if np.any(np.isfinite(capture_times)):
        t_end = np.nanmin(capture_times)
    else:
        t_end = t[-1]
    window = t <= t_end
    s = spread[window]
    if s.size == 0:
        return None
    above = np.where(s > tol)[0]
    if len(above) == 0:
        return float(t[0])
    idx = above[-1] + 1
    if idx >= len(s):
        return None
    return float(t[window][idx])


def run(sc: Scenario) -> SimLog:
    """Integrate a scenario until every interceptor captures or t_max."""
    n = sc.n
    nsteps = int(round(sc.t_max / sc.dt))
    world = make_world(sc)

    cols = (nsteps + 1, n)
    log = {
        name: np.zeros(cols)
        for name in ("r", "theta", "gamma", "tgo", "a_cmd", "a_real", "a_hat")
    }
    log_tx = np.zeros(nsteps + 1)
    log_ty = np.zeros(nsteps + 1)
    log_topo = np.zeros(nsteps + 1, dtype=int)

    frozen_r = world.r.copy()
    frozen_th = world.theta.copy()
    frozen_ga = world.gamma.copy()

    def snapshot(k: int):
        alive = world.alive
        log["r"][k] = np.where(alive, world.r, frozen_r)
        log["theta"][k] = np.where(alive, world.theta, frozen_th)
        log["gamma"][k] = np.where(alive, world.gamma, frozen_ga)
        log_tx[k] = world.tgt_x
        log_ty[k] = world.tgt_y

    k_end = nsteps
    for k in range(nsteps):
        pre_alive = world.alive.copy()
        snapshot(k)
        world = step(world, k * sc.dt, sc.dt)
        log["tgo"][k] = world.out_tgo
        log["a_cmd"][k] = world.out_a_cmd
        log["a_real"][k] = world.out_a_real
        log["a_hat"][k] = world.out_a_hat
        log_topo[k] = world.out_topo

        newly = pre_alive & ~world.alive
        if np.any(newly):
            frozen_r[newly] = world.r[newly]
            frozen_th[newly] = world.theta[newly]
            frozen_ga[newly] = world.gamma[newly]
        if not np.any(world.alive):
            k_end = k + 1
            break

    snapshot(k_end)
    compute_outputs(world, k_end * sc.dt)
    log["tgo"][k_end] = world.out_tgo
    log["a_cmd"][k_end] = np.where(world.alive, world.out_a_cmd, 0.0)
    if world.air is None:
        log["a_real"][k_end] = gd.saturate(log["a_cmd"][k_end], sc.guidance.cfg.a_max)
    else:
        log["a_real"][k_end] = log["a_real"][max(k_end - 1, 0)]
    log["a_hat"][k_end] = world.out_a_hat
    log_topo[k_end] = world.out_topo

    m = k_end + 1
    t_arr = np.arange(m) * sc.dt
    r_arr = log["r"][:m]
    th_arr = log["theta"][:m]
    ga_arr = log["gamma"][:m]
    tgo_arr = log["tgo"][:m]
    delta_arr = _wrap_pi(ga_arr - th_arr)
    tx, ty = log_tx[:m], log_ty[:m]
    x_arr = tx[:, None] - r_arr * np.cos(th_arr)
    y_arr = ty[:, None] - r_arr * np.sin(th_arr)
    spread = tgo_arr.max(axis=1) - tgo_arr.min(axis=1)

    consensus = consensus_time_of(t_arr, spread, world.capture_time, sc.spread_tol)
    captures = world.capture_time.copy()
    t_f = float(np.mean(captures)) if np.all(np.isfinite(captures)) else None

    return SimLog(
        t=t_arr,
        r=r_arr,
        theta=th_arr,
        gamma=ga_arr,
        delta=delta_arr,
        tgo=tgo_arr,
        a_cmd=log["a_cmd"][:m],
        a_real=log["a_real"][:m],
        a_hat=log["a_hat"][:m],
        x=x_arr,
        y=y_arr,
        target_x=tx,
        target_y=ty,
        topo=log_topo[:m],
        xi_spread=spread,
        capture_times=captures,
        consensus_time=consensus,
        t_f=t_f,
        scenario=sc,
    )
