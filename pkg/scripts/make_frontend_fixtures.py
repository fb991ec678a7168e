#!/usr/bin/env python3
"""Regenerate the frontend test fixtures: run every bundled preset as
bundled and write decimated CSV/JSON logs under frontend/fixtures/.

Usage:
    python scripts/make_frontend_fixtures.py [--decimate 100]
"""
import argparse
import shutil
import sys
from pathlib import Path

from salvosim.cli import emit_csv
from salvosim.config import load_scenario, preset_names
from salvosim.simulator import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--decimate", type=int, default=100)
    args = ap.parse_args()
    root = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"
    if root.exists():
        shutil.rmtree(root)
    for name in preset_names():
        log = run(load_scenario(name).scenario)
        files = emit_csv(log, root / name, decimation=args.decimate)
        print(f"{name}: {', '.join(f.name for f in files)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
