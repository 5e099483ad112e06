"""Command-line driver: ``hopegraphene --config run.cfg --out sweep.csv``.

Writes one CSV row per (d, f) point plus ``<out>.meta.json`` with the fully
resolved configuration. ``--convergence`` additionally writes per-order
coefficient norms to ``<out stem>.convergence.csv``.

Exit codes: 0 success, 1 configuration error, 2 every point failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .runconfig import load_run_file, resolved
from .sweep import CONVERGENCE_COLUMNS, columns, convergence_rows, run_sweep, to_csv
from .units import ConfigError

log = logging.getLogger("hopegraphene")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopegraphene",
                                     description="Absorbance of graphene ribbon gratings by HOPE and collocation.")
    parser.add_argument("--config", required=True, type=Path, help="keyed-text run configuration")
    parser.add_argument("--out", type=Path, default=Path("sweep.csv"), help="output CSV path")
    parser.add_argument("--solver", choices=("hope", "collocation", "both"), help="override the config solver")
    parser.add_argument("--summation", choices=("taylor", "pade"), help="override HOPE series summation")
    parser.add_argument("--convergence", action="store_true", help="also write coefficient-norm diagnostics")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for the sweep")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    return parser


def _convergence_path(out: Path) -> Path:
    return out.with_name(out.stem + ".convergence.csv")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(message)s")
    try:
        spec = load_run_file(args.config)
        overrides = {}
        if args.solver:
            overrides["solver"] = args.solver
        if args.summation:
            overrides["summation"] = args.summation
        if overrides:
            spec = spec.replace(**overrides)
        if args.workers < 1:
            raise ConfigError("--workers", "must be at least 1")
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_CONFIG

    n_points = len(spec.d_list) * len(spec.f_grid)
    log.info("sweeping %d point(s) with solver=%s, summation=%s", n_points, spec.solver, spec.summation)
    rows = run_sweep(spec, workers=args.workers)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(to_csv(rows, columns(spec)))
    meta = {"config": resolved(spec), "columns": columns(spec), "points": n_points}
    Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    failed = [r for r in rows if r["status"] != "ok"]
    for row in failed:
        log.warning("d=%g um f=%g THz failed: %s", row["d_um"], row["f_THz"], row["status"])

    if args.convergence:
        report = []
        for d in spec.d_list:
            try:
                report += convergence_rows(spec, d, spec.f_grid[0])
            except (ArithmeticError, RuntimeError, ValueError) as exc:
                log.warning("convergence report failed for d=%g: %s", d, exc)
        _convergence_path(args.out).write_text(to_csv(report, CONVERGENCE_COLUMNS))

    log.info("wrote %s (%d ok, %d failed)", args.out, n_points - len(failed), len(failed))
    if rows and len(failed) == len(rows):
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
