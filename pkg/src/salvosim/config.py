"""Scenario files: TOML schema, validation, and bundled presets.

Configs carry angles in degrees and acceleration limits in g to match
the published tables; everything is converted to radians and m/s^2 at
load time. Gains omitted from a config are derived from the
settling-time conditions and echoed back in the run summary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .airframe import AirframeParams
from .engagement import TargetModel, wrap_angle
from .estimation import ObserverGains
from .guidance import GRAV, GainConstraintError, GuidanceConfig
from .network import DisconnectedGraphError, SwitchingSchedule, Topology, is_connected
from .simulator import Scenario, resolve_gains

DEG = math.pi / 180.0


class ScenarioValidationError(ValueError):
    """Configuration rejected; the message names the violated constraint."""


@dataclass
class LoadedScenario:
    scenario: Scenario
    raw: dict[str, Any]
    warnings: list[str] = field(default_factory=list)
    source: str = ""


def preset_names() -> list[str]:
    pkg = resources.files("salvosim.presets")
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".toml"))


def _read_toml(source: str) -> tuple[dict[str, Any], str]:
    path = Path(source)
    if path.exists():
        with open(path, "rb") as fh:
            try:
                return tomllib.load(fh), str(path)
            except tomllib.TOMLDecodeError as exc:
                raise ScenarioValidationError(f"parse error in {path}: {exc}") from exc
    pkg = resources.files("salvosim.presets")
    candidate = pkg / f"{source}.toml"
    if candidate.is_file():
        return tomllib.loads(candidate.read_text()), f"preset:{source}"
    raise ScenarioValidationError(
        f"scenario {source!r} is neither a file nor a bundled preset "
        f"(presets: {', '.join(preset_names())})"
    )


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ScenarioValidationError(f"missing key {key!r} in [{where}]")
    return table[key]


def _accel_profile(spec: Any):
    if spec in (None, 0, 0.0):
        return lambda t: 0.0
    if isinstance(spec, (int, float)):
        value = float(spec)
        return lambda t: value
    form = spec.get("form", "bias_sine")
    if form == "constant":
        value = float(spec["value"])
        return lambda t: value
    if form == "bias_sine":
        bias = float(spec.get("bias", 0.0))
        amp = float(spec.get("amplitude", 0.0))
        period = float(spec.get("period", 1.0))
        if period <= 0.0:
            raise ScenarioValidationError("accel period must be positive")
        omega = 2.0 * math.pi / period
        phase = float(spec.get("phase_deg", 0.0)) * DEG
        return lambda t: bias + amp * math.sin(omega * t + phase)
    raise ScenarioValidationError(f"unknown accel form {form!r}")


def _target(table: dict) -> TargetModel:
    kind = _require(table, "kind", "target")
    pos = table.get("position", [0.0, 0.0])
    return TargetModel(
        kind=kind,
        v_t=float(table.get("speed", 0.0)),
        gamma_t=float(table.get("heading_deg", 0.0)) * DEG,
        accel_profile=_accel_profile(table.get("accel")),
        x=float(pos[0]),
        y=float(pos[1]),
    )


def _per_agent(value, n: int, key: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return tuple(float(value) for _ in range(n))
    if len(value) != n:
        raise ScenarioValidationError(f"{key} must have {n} entries, got {len(value)}")
    return tuple(float(x) for x in value)


def _network(table: dict, n: int, t_max: float, seed: int) -> SwitchingSchedule:
    if "edges" in table:
        g = Topology.from_edge_list(n, table["edges"])
        if not is_connected(g):
            raise ScenarioValidationError("communication graph must be connected")
        return SwitchingSchedule.fixed(g)
    if "graphs" not in table:
        raise ScenarioValidationError("[network] needs either 'edges' or 'graphs'")
    graphs = []
    for i, sub in enumerate(table["graphs"], start=1):
        g = Topology.from_edge_list(n, sub["edges"])
        if not is_connected(g):
            raise ScenarioValidationError(f"graph {i} in the family is disconnected")
        graphs.append(g)
    signal = table.get("signal", "random")
    if signal == "random":
        min_dwell = float(table.get("min_dwell", 0.5))
        max_dwell = float(table.get("max_dwell", 3.0 * min_dwell))
        return SwitchingSchedule.random(graphs, min_dwell, max_dwell, t_max, seed)
    segments = tuple((float(t), int(idx)) for t, idx in signal)
    return SwitchingSchedule(
        graphs=tuple(graphs),
        segments=segments,
        min_dwell=float(table.get("min_dwell", 0.0)),
    )


def _guidance(table: dict) -> GuidanceConfig:
    law = _require(table, "law", "guidance")
    opt = lambda key: table.get(key)
    tup = lambda key: tuple(table[key]) if isinstance(table.get(key), list) else opt(key)
    try:
        return GuidanceConfig(
            law=law,
            t_s=float(table.get("ts", 5.0)),
            c=float(table.get("c", 0.0125)),
            d=float(table.get("d", 4.0)),
            b_gain=tup("b_gain"),
            eps=opt("eps"),
            p_gain=tup("p_gain"),
            mu=opt("mu"),
            m_coef=float(table.get("m_coef", 1.0)),
            n_coef=float(table.get("n_coef", 1.0)),
            m_exp=float(table.get("m_exp", 0.1)),
            n_exp=float(table.get("n_exp", 2.0)),
            k_exp=float(table.get("k_exp", 2.0)),
            n_nav=float(table.get("n_nav", 3.0)),
            a_max=float(table.get("a_max_g", 20.0)) * GRAV,
            xi_max=float(table.get("xi_max", 0.5)),
            sign_boundary_layer=bool(table.get("sign_boundary_layer", True)),
            bl_width=float(table.get("bl_width", 1e-3)),
        )
    except (GainConstraintError, ValueError) as exc:
        raise ScenarioValidationError(str(exc)) from exc


def _observer(table: Optional[dict]) -> ObserverGains:
    if not table:
        return ObserverGains()
    g = table.get("g", [0.01, 0.05, 1.30])
    h = table.get("h", [0.005, 3.25, 3.3])
    return ObserverGains(
        g0=float(g[0]), g1=float(g[1]), g2=float(g[2]),
        h0=float(h[0]), h1=float(h[1]), h2=float(h[2]),
        f_bound=float(table.get("f_bound", 0.1)),
    )


def _airframe(table: Optional[dict]) -> Optional[AirframeParams]:
    if not table or not table.get("enabled", False):
        return None
    keys = (
        "mass", "inertia", "tau_c", "tau_t", "lift_alpha", "lift_canard",
        "lift_tail", "moment_alpha", "moment_q", "moment_canard", "moment_tail",
        "alpha_gain", "q_gain", "canard_share",
    )
    kwargs = {k: float(table[k]) for k in keys if k in table}
    if "deflection_limit_deg" in table:
        kwargs["deflection_limit"] = float(table["deflection_limit_deg"]) * DEG
    return AirframeParams(**kwargs)


def load_scenario(
    source: str,
    dt: Optional[float] = None,
    seed: Optional[int] = None,
    law: Optional[str] = None,
    t_s: Optional[float] = None,
) -> LoadedScenario:
    """Parse, validate and resolve a scenario file or bundled preset.

    Optional arguments override the corresponding config entries before
    validation (the CLI exposes them as flags).
    """
    raw, origin = _read_toml(source)
    try:
        sim = raw.get("sim", {})
        dt_v = float(dt if dt is not None else sim.get("dt", 1e-3))
        t_max = float(sim.get("t_max", 60.0))
        seed_v = int(seed if seed is not None else sim.get("seed", 0))

        itab = _require(raw, "interceptors", "interceptors")
        los = [float(x) * DEG for x in _require(itab, "los_deg", "interceptors")]
        n = len(los)
        heading = [float(x) * DEG for x in _require(itab, "heading_deg", "interceptors")]
        if len(heading) != n:
            raise ScenarioValidationError("heading_deg and los_deg lengths differ")
        r0 = _per_agent(_require(itab, "range", "interceptors"), n, "range")
        v = _per_agent(_require(itab, "speed", "interceptors"), n, "speed")

        gtab = dict(_require(raw, "guidance", "guidance"))
        if law is not None:
            gtab["law"] = law
        if t_s is not None:
            gtab["ts"] = t_s
        cfg = _guidance(gtab)

        target = _target(_require(raw, "target", "target"))
        network = _network(_require(raw, "network", "network"), n, t_max, seed_v)

        deltas = [wrap_angle(g - t) for g, t in zip(heading, los)]
        for i, d in enumerate(deltas, start=1):
            if abs(d) >= math.pi / 2.0:
                raise ScenarioValidationError(
                    f"interceptor {i} starts with |look angle| = "
                    f"{abs(d) / DEG:.1f} deg >= 90 deg"
                )

        resolved, warnings = resolve_gains(
            cfg, network, np.asarray(r0), np.asarray(v), target.v_t
        )
        scenario = Scenario(
            r0=r0,
            theta0=tuple(los),
            gamma0=tuple(heading),
            v=v,
            target=target,
            network=network,
            guidance=resolved,
            observer=_observer(raw.get("observer")),
            airframe=_airframe(raw.get("airframe")),
            dt=dt_v,
            t_max=t_max,
            capture_radius=float(sim.get("capture_radius", 1.0)),
            spread_tol=float(sim.get("spread_tol", 0.1)),
            seed=seed_v,
            name=raw.get("meta", {}).get("name", Path(source).stem),
        )
    except ScenarioValidationError:
        raise
    except (GainConstraintError, DisconnectedGraphError, ValueError, KeyError) as exc:
        raise ScenarioValidationError(str(exc)) from exc
    return LoadedScenario(scenario=scenario, raw=raw, warnings=warnings, source=origin)
