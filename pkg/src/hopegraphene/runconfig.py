"""Keyed-text run configuration: parsing and validation of sweep settings.

The file is flat ``key = value`` lines; ``#`` starts a comment. Units are in
the key suffix. Example::

    eps_u = 3
    eps_w = 4
    d_um = 8, 4, 2, 1
    theta_deg = 0
    pol = TM
    f_min_THz = 0.5
    f_max_THz = 12
    n_f = 100
    E_F_eV = 0.4
    Gamma_meV = 3.7
    vF_m_per_s = 1e6
    tau_s = 9e-14
    nonlocal = both
    X0 = 1
    ribbon_width_fraction = 0.5
    delta = 1
    N_x = 128
    L = 16
    pade = true
    solver = hope
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .conductivity import GrapheneParams
from .units import UM, THZ, ConfigError, PhysicalConfig, to_keyed, validate

SOLVERS = ("hope", "collocation", "both")
MODELS = ("local", "nonlocal", "both")

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def parse_keyed_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in raw:
            raise ConfigError(key, f"duplicate key on line {lineno}")
        raw[key] = value
    return raw


def _bool(raw, key, default):
    if key not in raw:
        return default
    value = str(raw[key]).strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ConfigError(key, f"expected a boolean, got {raw[key]!r}")


def _float(raw, key, default=None):
    if key not in raw:
        if default is None:
            raise ConfigError(key, "missing required key")
        return default
    try:
        value = float(raw[key])
    except (TypeError, ValueError):
        raise ConfigError(key, f"not a number: {raw[key]!r}")
    if not math.isfinite(value):
        raise ConfigError(key, f"not finite: {raw[key]!r}")
    return value


def _int(raw, key, default):
    value = _float(raw, key, float(default))
    if value != int(value):
        raise ConfigError(key, f"expected an integer, got {raw[key]!r}")
    return int(value)


def _float_list(raw, key):
    value = raw[key]
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [v for v in str(value).replace(";", ",").split(",") if v.strip()]
    try:
        return [float(v) for v in items]
    except ValueError:
        raise ConfigError(key, f"not a list of numbers: {value!r}")


@dataclasses.dataclass(frozen=True)
class RunSpec:
    """Everything a sweep needs, from the physical setup down to numerical options."""

    physical: PhysicalConfig
    d_list: tuple[float, ...]
    f_grid: tuple[float, ...]
    graphene: Optional[GrapheneParams]
    models: str = "local"
    X0: float = 1.0
    width_fraction: float = 0.5
    delta: float = 1.0
    N_x: int = 128
    L: int = 16
    summation: str = "pade"
    solver: str = "hope"
    sobolev_s: float = 0.0
    dealias: bool = False
    pade_pointwise: bool = False

    def __post_init__(self):
        if not self.f_grid or any(b <= a for a, b in zip(self.f_grid, self.f_grid[1:])):
            raise ConfigError("f_THz", "frequency grid must be nonempty and strictly increasing")
        if not self.d_list or any(d <= 0 for d in self.d_list):
            raise ConfigError("d_um", "periods must be positive")
        if self.solver not in SOLVERS:
            raise ConfigError("solver", f"expected one of {SOLVERS}, got {self.solver!r}")
        if self.models not in MODELS:
            raise ConfigError("nonlocal", f"expected true, false or both, got {self.models!r}")
        if self.summation not in ("taylor", "pade"):
            raise ConfigError("pade", f"unknown summation {self.summation!r}")
        if self.X0 == 0:
            raise ConfigError("X0", "must be nonzero")
        if not 0 < self.width_fraction <= 1:
            raise ConfigError("ribbon_width_fraction", "must lie in (0, 1]")
        if self.N_x < 8 or self.N_x & (self.N_x - 1):
            raise ConfigError("N_x", f"must be a power of two >= 8, got {self.N_x}")
        if self.L < 0:
            raise ConfigError("L", "must be nonnegative")
        if self.sobolev_s < 0:
            raise ConfigError("sobolev_s", "must be nonnegative")

    def replace(self, **changes) -> "RunSpec":
        return dataclasses.replace(self, **changes)

    def graphene_for(self, nonlocal_: bool) -> Optional[GrapheneParams]:
        if self.graphene is None:
            return None
        return self.graphene.with_nonlocal(nonlocal_)

    @property
    def primary_nonlocal(self) -> bool:
        return self.models in ("nonlocal", "both")


def load_run(raw: Mapping[str, object]) -> RunSpec:
    """Validate keyed values into a :class:`RunSpec` (SI units throughout)."""
    d_values = _float_list(raw, "d_um") if "d_um" in raw else None
    if not d_values:
        raise ConfigError("d_um", "missing required key")
    for d in d_values:
        if not (math.isfinite(d) and d > 0):
            raise ConfigError("d_um", f"must be positive, got {d!r}")
    if "f_THz" in raw:
        f_grid = tuple(f * THZ for f in _float_list(raw, "f_THz"))
        for f in f_grid:
            if not f > 0:
                raise ConfigError("f_THz", "frequencies must be positive")
    elif "f_min_THz" in raw:
        f_min = _float(raw, "f_min_THz")
        f_max = _float(raw, "f_max_THz", f_min)
        n_f = _int(raw, "n_f", 1)
        if n_f < 1:
            raise ConfigError("n_f", "must be at least 1")
        if f_min <= 0:
            raise ConfigError("f_min_THz", "must be positive")
        if n_f > 1 and f_max <= f_min:
            raise ConfigError("f_max_THz", "must exceed f_min_THz")
        f_grid = tuple(float(f) * THZ for f in np.linspace(f_min, f_max, n_f))
    else:
        raise ConfigError("f_THz", "missing frequency (f_THz or f_min_THz/f_max_THz/n_f)")

    base = dict(raw)
    base["d_um"] = d_values[0]
    base["f_THz"] = f_grid[0] / THZ
    physical = validate(base).with_frequency(f_grid[0])

    models_raw = str(raw.get("nonlocal", "false")).strip().lower()
    if models_raw == "both":
        models = "both"
    elif models_raw in _TRUE:
        models = "nonlocal"
    elif models_raw in _FALSE:
        models = "local"
    else:
        raise ConfigError("nonlocal", f"expected true, false or both, got {raw['nonlocal']!r}")

    graphene = None
    if _bool(raw, "graphene", True):
        E_F = _float(raw, "E_F_eV", 0.4)
        Gamma = _float(raw, "Gamma_meV", 3.7)
        v_F = _float(raw, "vF_m_per_s", 1.0e6)
        tau = _float(raw, "tau_s", 9.0e-14)
        for key, value in (("E_F_eV", E_F), ("Gamma_meV", Gamma), ("vF_m_per_s", v_F), ("tau_s", tau)):
            if value <= 0:
                raise ConfigError(key, f"must be positive, got {value!r}")
        graphene = GrapheneParams.from_units(E_F, Gamma, v_F, tau)

    return RunSpec(
        physical=physical,
        d_list=tuple(d * UM for d in d_values),
        f_grid=f_grid,
        graphene=graphene,
        models=models,
        X0=_float(raw, "X0", 1.0),
        width_fraction=_float(raw, "ribbon_width_fraction", 0.5),
        delta=_float(raw, "delta", 1.0),
        N_x=_int(raw, "N_x", 128),
        L=_int(raw, "L", 16),
        summation="pade" if _bool(raw, "pade", True) else "taylor",
        solver=str(raw.get("solver", "hope")).strip().lower(),
        sobolev_s=_float(raw, "sobolev_s", 0.0),
        dealias=_bool(raw, "dealias", False),
        pade_pointwise=_bool(raw, "pade_pointwise", False),
    )


def load_run_file(path) -> RunSpec:
    return load_run(parse_keyed_text(Path(path).read_text()))


def resolved(spec: RunSpec) -> dict[str, object]:
    """Fully resolved configuration (SI and declared units) for provenance records."""
    out: dict[str, object] = dict(to_keyed(spec.physical))
    out.pop("f_THz")
    out["d_um"] = [d / UM for d in spec.d_list]
    out["f_THz"] = [f / THZ for f in spec.f_grid]
    out["d_m"] = list(spec.d_list)
    out["f_Hz"] = list(spec.f_grid)
    if spec.graphene is None:
        out["graphene"] = False
    else:
        g = spec.graphene
        out.update(graphene=True, E_F_J=g.E_F, Gamma_J=g.Gamma, vF_m_per_s=g.v_F, tau_s=g.tau)
    out.update(nonlocal_models=spec.models, X0=spec.X0, ribbon_width_fraction=spec.width_fraction,
               delta=spec.delta, N_x=spec.N_x, L=spec.L, summation=spec.summation, solver=spec.solver,
               sobolev_s=spec.sobolev_s, dealias=spec.dealias, pade_pointwise=spec.pade_pointwise)
    return out
