"""Frequency/period sweeps and convergence diagnostics.

One task per (d, f) point; every numerical object is built inside the task,
so points can run in worker processes and are collected in (d, f) order.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import io
import math
from typing import Iterable

import numpy as np

from . import collocation
from .conductivity import SigmaPair, sample_envelope, sigma_pair
from .hope import hope_recursion, norm_ratios, pade_sum, sobolev_norm, taylor_sum
from .observables import efficiencies
from .runconfig import RunSpec
from .solver import Order0Operator
from .spectral import build_grid
from .units import THZ, UM, PhysicalConfig


@dataclasses.dataclass(frozen=True)
class PointSolution:
    R: float
    T: float
    A: float
    min_abs_determinant: float
    pade_fallback_count: int


def _sigma(spec: RunSpec, f: float, nonlocal_: bool) -> SigmaPair:
    graphene = spec.graphene_for(nonlocal_)
    return SigmaPair.zero() if graphene is None else sigma_pair(graphene, f)


def solve_hope(spec: RunSpec, config: PhysicalConfig, sigma: SigmaPair) -> PointSolution:
    grid = build_grid(config, spec.N_x)
    envelope = sample_envelope(config.d, spec.X0, spec.width_fraction, spec.N_x)
    series = hope_recursion(grid, sigma, envelope, spec.L, s=spec.sobolev_s, dealias=spec.dealias)
    if spec.summation == "pade":
        U, W, fallbacks = pade_sum(series, spec.delta, pointwise=spec.pade_pointwise)
    else:
        (U, W), fallbacks = taylor_sum(series, spec.delta), 0
    obs = efficiencies(grid, U, W, lossless=sigma.is_zero)
    return PointSolution(obs.R, obs.T, obs.A, series.operator.profile.min_abs, fallbacks)


def solve_collocation(spec: RunSpec, config: PhysicalConfig, sigma: SigmaPair) -> PointSolution:
    grid = build_grid(config, spec.N_x)
    envelope = sample_envelope(config.d, spec.X0, spec.width_fraction, spec.N_x)
    system = collocation.assemble(grid, sigma, envelope, spec.delta)
    U, W = collocation.solve(system)
    obs = efficiencies(grid, U, W, lossless=sigma.is_zero)
    profile = Order0Operator.build(grid, sigma, spec.X0).profile
    return PointSolution(obs.R, obs.T, obs.A, profile.min_abs, 0)


def columns(spec: RunSpec) -> list[str]:
    cols = ["d_um", "f_THz", "solver", "status", "R", "T", "A"]
    if spec.models == "both":
        cols += ["A_local", "A_nonlocal"]
    if spec.solver == "both":
        cols += ["R_colloc", "T_colloc", "A_colloc", "A_diff"]
        if spec.models == "both":
            cols += ["A_local_colloc", "A_nonlocal_colloc"]
    cols += ["min_abs_determinant", "pade_fallback_count"]
    return cols


def _models(spec: RunSpec) -> list[bool]:
    if spec.models == "both":
        return [False, True]
    return [spec.primary_nonlocal]


def solve_point(spec: RunSpec, d: float, f: float) -> dict[str, object]:
    """Compute one output row. Numerical failures land in ``status``."""
    row: dict[str, object] = {c: math.nan for c in columns(spec)}
    row.update(d_um=d / UM, f_THz=f / THZ, solver=spec.solver, status="ok", pade_fallback_count=0)
    try:
        config = spec.physical.with_period(d).with_frequency(f)
        primary = spec.primary_nonlocal
        solvers = {"hope": [solve_hope], "collocation": [solve_collocation],
                   "both": [solve_hope, solve_collocation]}[spec.solver]
        for which, fn in enumerate(solvers):
            suffix = "_colloc" if which == 1 else ""
            for nonlocal_ in _models(spec):
                sol = fn(spec, config, _sigma(spec, f, nonlocal_))
                if spec.models == "both":
                    row[("A_nonlocal" if nonlocal_ else "A_local") + suffix] = sol.A
                if nonlocal_ == primary:
                    row["R" + suffix] = sol.R
                    row["T" + suffix] = sol.T
                    row["A" + suffix] = sol.A
                    if which == 0:
                        row["min_abs_determinant"] = sol.min_abs_determinant
                if which == 0:
                    row["pade_fallback_count"] = int(row["pade_fallback_count"]) + sol.pade_fallback_count
        if spec.solver == "both":
            row["A_diff"] = row["A"] - row["A_colloc"]
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        row["status"] = f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
    return row


def _task(args):
    spec, d, f = args
    return solve_point(spec, d, f)


def points(spec: RunSpec) -> list[tuple[float, float]]:
    return [(d, f) for d in spec.d_list for f in spec.f_grid]


def run_sweep(spec: RunSpec, workers: int = 1) -> list[dict[str, object]]:
    """Evaluate every (d, f) point; rows come back in (d, f) order regardless of ``workers``."""
    tasks = [(spec, d, f) for d, f in points(spec)]
    if workers <= 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    return str(value)


def to_csv(rows: Iterable[dict[str, object]], cols: list[str]) -> str:
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row.get(c, "")) for c in cols) + "\n")
    return buf.getvalue()


CONVERGENCE_COLUMNS = ["d_um", "f_THz", "order", "norm_U", "norm_W", "ratio_U", "ratio_W"]


def convergence_report(config: PhysicalConfig, sigma: SigmaPair, envelope, N_x: int, L: int,
                       s: float = 0.0) -> list[dict[str, object]]:
    """Per-order Sobolev norms of the HOPE coefficients and their successive ratios.

    Ratios are NaN (undefined) where the previous norm is zero, e.g. for every
    order past zero when the envelope is flat or the sheet is absent.
    """
    grid = build_grid(config, N_x)
    series = hope_recursion(grid, sigma, envelope, L, s=s)
    norms_u = np.array([sobolev_norm(u, s) for u in series.U])
    norms_w = np.array([sobolev_norm(w, s) for w in series.W])
    ratio_u = np.concatenate([[math.nan], norm_ratios(norms_u)])
    ratio_w = np.concatenate([[math.nan], norm_ratios(norms_w)])
    return [
        {"d_um": config.d / UM, "f_THz": config.f / THZ, "order": order, "norm_U": float(norms_u[order]),
         "norm_W": float(norms_w[order]), "ratio_U": float(ratio_u[order]), "ratio_W": float(ratio_w[order])}
        for order in range(L + 1)
    ]


def convergence_rows(spec: RunSpec, d: float, f: float) -> list[dict[str, object]]:
    config = spec.physical.with_period(d).with_frequency(f)
    envelope = sample_envelope(d, spec.X0, spec.width_fraction, spec.N_x)
    return convergence_report(config, _sigma(spec, f, spec.primary_nonlocal), envelope, spec.N_x, spec.L,
                              spec.sobolev_s)


def find_peak(f_grid, values) -> tuple[float, float]:
    """Frequency and height of the largest finite value."""
    values = np.asarray(values, dtype=float)
    i = int(np.nanargmax(values))
    return float(np.asarray(f_grid)[i]), float(values[i])


__all__ = [
    "PointSolution", "solve_hope", "solve_collocation", "solve_point", "run_sweep", "to_csv", "columns",
    "convergence_report", "convergence_rows", "find_peak", "CONVERGENCE_COLUMNS",
]
