"""Plane-wave scattering by graphene ribbon gratings between two dielectrics.

The ribbons are modelled as a sheet conductivity modulated by an envelope
``X(x; delta) = X0 + delta X1(x)``. Fields are computed either by a
high-order perturbation of envelopes (HOPE) series in delta, summed by
Taylor or Pade, or by a direct collocation solve at fixed delta.
"""

from .collocation import SingularSystemError
from .conductivity import Envelope, GrapheneParams, SigmaPair, flat_envelope, sample_envelope, sigma_pair
from .hope import DivergenceError, HopeSeries, hope_recursion, pade_sum, pade_sum_many, sobolev_norm, taylor_sum
from .observables import Observables, efficiencies
from .runconfig import RunSpec, load_run, load_run_file
from .solver import Order0Operator, ResonanceError
from .spectral import GridError, SpectralGrid, build_grid
from .units import THZ, UM, ConfigError, PhysicalConfig, Polarization, validate

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DivergenceError", "Envelope", "GrapheneParams", "GridError", "HopeSeries", "Observables",
    "Order0Operator", "PhysicalConfig", "Polarization", "ResonanceError", "RunSpec", "SigmaPair",
    "SingularSystemError", "SpectralGrid", "THZ", "UM", "build_grid", "efficiencies", "flat_envelope",
    "hope_recursion", "load_run", "load_run_file", "pade_sum", "pade_sum_many", "sample_envelope", "sigma_pair", "sobolev_norm",
    "taylor_sum", "validate",
]
