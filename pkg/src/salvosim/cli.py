"""Command-line front end: run scenarios, validate configs, list presets,
and print spectral/gain diagnostics.

Exit codes: 0 success, 2 validation failure, 3 runtime divergence, 4 I/O.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import LoadedScenario, ScenarioValidationError, load_scenario, preset_names
from .guidance import GRAV
from .network import algebraic_connectivity
from .simulator import SimLog, SimulationDivergenceError, run

CSV_HEADER = "t,agent,r,theta,gamma,delta,tgo,a_cmd,a_real,aT_hat,topo,x,y"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIVERGENCE = 3
EXIT_IO = 4


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(log: SimLog, out_dir: Path, decimation: int = 10) -> list[Path]:
    """Write timeseries.csv (one row per agent per retained sample, '.'
    decimal separator, full round-trip precision) and events.json."""
    if decimation < 1:
        raise ValueError("decimation must be >= 1")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "timeseries.csv"
    rows = [CSV_HEADER]
    idx = list(range(0, len(log.t), decimation))
    if idx and idx[-1] != len(log.t) - 1:
        idx.append(len(log.t) - 1)
    for k in idx:
        t = _fmt(log.t[k])
        topo = str(int(log.topo[k]))
        for a in range(log.n):
            rows.append(
                ",".join(
                    (
                        t,
                        str(a + 1),
                        _fmt(log.r[k, a]),
                        _fmt(log.theta[k, a]),
                        _fmt(log.gamma[k, a]),
                        _fmt(log.delta[k, a]),
                        _fmt(log.tgo[k, a]),
                        _fmt(log.a_cmd[k, a]),
                        _fmt(log.a_real[k, a]),
                        _fmt(log.a_hat[k, a]),
                        topo,
                        _fmt(log.x[k, a]),
                        _fmt(log.y[k, a]),
                    )
                )
            )
    csv_path.write_text("\n".join(rows) + "\n")

    events_path = out_dir / "events.json"
    events_path.write_text(json.dumps(summarize(log), indent=2, sort_keys=True) + "\n")
    target_path = out_dir / "target.csv"
    target_rows = ["t,x,y"]
    for k in idx:
        target_rows.append(
            ",".join((_fmt(log.t[k]), _fmt(log.target_x[k]), _fmt(log.target_y[k])))
        )
    target_path.write_text("\n".join(target_rows) + "\n")
    return [csv_path, events_path, target_path]


def summarize(log: SimLog) -> dict:
    sc = log.scenario
    gains = sc.guidance
    captures = [
        float(c) if np.isfinite(c) else None for c in log.capture_times
    ]
    pip = None
    if gains.cfg.law == "pip_baseline" and log.t_f is not None:
        # the swarm's common aim point coincides with the target at T_f
        pip = {
            "x": float(np.interp(log.t_f, log.t, log.target_x)),
            "y": float(np.interp(log.t_f, log.t, log.target_y)),
        }
    return {
        "pip": pip,
        "scenario": sc.name,
        "law": gains.cfg.law,
        "n": sc.n,
        "dt": sc.dt,
        "t_s": gains.cfg.t_s,
        "capture_radius": sc.capture_radius,
        "spread_tol": sc.spread_tol,
        "seed": sc.seed,
        "consensus_time": log.consensus_time,
        "capture_times": captures,
        "all_captured": log.all_captured,
        "capture_spread": log.capture_spread if log.all_captured else None,
        "t_f": log.t_f,
        "final_spread": float(log.xi_spread[-1]) if len(log.xi_spread) else None,
        "gains": {
            "lambda2": gains.lambda2,
            "min_lambda2": gains.min_lambda2,
            "min_edges": gains.min_edges,
            "b_gain": [float(b) for b in gains.b_gain],
            "p_gain": [float(p) for p in gains.p_gain],
            "eps": gains.eps,
            "mu": gains.mu,
            "a_max_g": gains.cfg.a_max / GRAV,
        },
    }


def _cmd_run(args) -> int:
    loaded = load_scenario(args.scenario, dt=args.dt, seed=args.seed,
                           law=args.law, t_s=args.ts)
    for w in loaded.warnings:
        print(f"warning: {w}", file=sys.stderr)
    out_dir = Path(args.out)
    existing = [p for p in ("timeseries.csv", "events.json") if (out_dir / p).exists()]
    if existing and not args.force:
        print(
            f"error: {', '.join(existing)} already in {out_dir}; use --force",
            file=sys.stderr,
        )
        return EXIT_IO
    log = run(loaded.scenario)
    files = emit_csv(log, out_dir, decimation=args.decimate)
    summary = summarize(log)
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"wrote {', '.join(str(f) for f in files)}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    loaded = load_scenario(args.scenario)
    sc = loaded.scenario
    print(f"{sc.name}: ok ({sc.n} interceptors, law {sc.guidance.cfg.law})")
    for w in loaded.warnings:
        print(f"warning: {w}")
    return EXIT_OK


def _cmd_presets(_args) -> int:
    for name in preset_names():
        print(name)
    return EXIT_OK


def _cmd_spectral(args) -> int:
    loaded = load_scenario(args.scenario)
    sc = loaded.scenario
    gains = sc.guidance
    lines = {
        "graphs": [
            {"edges": list(g.edges), "lambda2": algebraic_connectivity(g)}
            for g in sc.network.graphs
        ],
        "min_lambda2": gains.min_lambda2,
        "min_edges": gains.min_edges,
        "b_gain": [float(b) for b in gains.b_gain],
        "p_gain": [float(p) for p in gains.p_gain],
        "eps": gains.eps,
        "mu": gains.mu,
    }
    print(json.dumps(lines, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="salvosim",
        description="Cooperative salvo guidance simulator",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write CSV/JSON logs")
    p_run.add_argument("--scenario", required=True, help="path or preset name")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--dt", type=float, default=None, help="override time step [s]")
    p_run.add_argument("--seed", type=int, default=None, help="override RNG seed")
    p_run.add_argument("--law", default=None, help="override guidance law")
    p_run.add_argument("--ts", type=float, default=None, help="override T_s [s]")
    p_run.add_argument("--decimate", type=int, default=10, help="CSV sample stride")
    p_run.add_argument("--force", action="store_true", help="overwrite outputs")
    p_run.set_defaults(fn=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("--scenario", required=True)
    p_val.set_defaults(fn=_cmd_validate)

    p_pre = sub.add_parser("presets", help="list bundled scenarios")
    p_pre.set_defaults(fn=_cmd_presets)

    p_spec = sub.add_parser("spectral", help="print connectivity and derived gains")
    p_spec.add_argument("--scenario", required=True)
    p_spec.set_defaults(fn=_cmd_spectral)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationDivergenceError as exc:
        print(f"divergence at t={exc.t:.4f}: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
