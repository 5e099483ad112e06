"""Graphene surface conductivity (Drude and BGK) and the ribbon envelope.

Time convention is exp(-i omega t). Conductivities are made dimensionless by
eps0*c0. The local Drude form used here is

    sigma_Drude = (sigma0 / (eps0 c0)) (4 E_F / pi) / (hbar gamma - i hbar omega)
                = e^2 E_F / (pi hbar^2 eps0 c0 (gamma - i omega)),

the standard intraband graphene conductivity. The look-alike expression
``2 E_F e^2 / (eps0 c0 (Gamma - i h f))`` is off by a factor of Planck's
constant and is not dimensionless; it is not used.

The BGK model multiplies the Drude value by ``1 - Q d^2/dx^2`` with

    Q = v_F^2 (3 f + 2 i / tau) / (4 f (f + i / tau)^2)

giving ``sigma_loc - sigma_nloc d^2/dx^2`` with ``sigma_nloc = sigma_loc * Q``.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .units import Constants, EV, MEV


@dataclasses.dataclass(frozen=True)
class GrapheneParams:
    """Material parameters in SI (energies in joules)."""

    E_F: float
    Gamma: float
    v_F: float = 1.0e6
    tau: float = 9.0e-14
    nonlocal_: bool = False

    def __post_init__(self):
        for name in ("E_F", "Gamma", "v_F", "tau"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")

    @classmethod
    def from_units(cls, E_F_eV: float, Gamma_meV: float, v_F: float = 1.0e6, tau: float = 9.0e-14,
                   nonlocal_: bool = False) -> "GrapheneParams":
        return cls(E_F=E_F_eV * EV, Gamma=Gamma_meV * MEV, v_F=v_F, tau=tau, nonlocal_=nonlocal_)

    @property
    def relaxation_rate(self) -> float:
        """gamma = Gamma / hbar, in 1/s."""
        return self.Gamma / Constants.hbar

    def with_nonlocal(self, flag: bool) -> "GrapheneParams":
        return dataclasses.replace(self, nonlocal_=flag)


@dataclasses.dataclass(frozen=True)
class SigmaPair:
    """Local (dimensionless) and nonlocal (m^2) conductivity coefficients."""

    sigma_loc: complex
    sigma_nloc: complex = 0j

    @classmethod
    def zero(cls) -> "SigmaPair":
        return cls(0j, 0j)

    @property
    def is_zero(self) -> bool:
        return self.sigma_loc == 0 and self.sigma_nloc == 0

    def symbol(self, alpha_p):
        """Fourier symbol of ``sigma_loc - sigma_nloc d^2/dx^2`` at wavenumbers ``alpha_p``."""
        alpha_p = np.asarray(alpha_p)
        return self.sigma_loc + self.sigma_nloc * alpha_p**2


def _check_frequency(f: float) -> None:
    if not (math.isfinite(f) and f > 0):
        raise ValueError(f"frequency must be positive, got {f!r}")


def drude(params: GrapheneParams, f: float) -> complex:
    _check_frequency(f)
    c = Constants
    omega = 2.0 * math.pi * f
    prefactor = (c.sigma0 / (c.eps0 * c.c0)) * (4.0 * params.E_F / math.pi)
    return prefactor / (c.hbar * params.relaxation_rate - 1j * c.hbar * omega)


def bgk_q(params: GrapheneParams, f: float) -> complex:
    """Nonlocal BGK factor Q in m^2. Note ``f`` is the ordinary frequency, not omega."""
    _check_frequency(f)
    if not params.tau > 0:
        raise ValueError(f"tau must be positive, got {params.tau!r}")
    inv_tau = 1.0 / params.tau
    return params.v_F**2 * (3.0 * f + 2j * inv_tau) / (4.0 * f * (f + 1j * inv_tau) ** 2)


def sigma_pair(params: GrapheneParams, f: float) -> SigmaPair:
    loc = drude(params, f)
    if not params.nonlocal_:
        return SigmaPair(loc, 0j)
    return SigmaPair(loc, loc * bgk_q(params, f))


@dataclasses.dataclass(frozen=True)
class Envelope:
    """Ribbon envelope X(x; delta) = X0 + delta * X1(x), sampled on a uniform grid.

    ``samples_X1`` holds X1 at ``x_j = d j / n`` for ``j = 0..n-1``.
    """

    d: float
    X0: float
    width_fraction: float
    samples_X1: np.ndarray

    @property
    def n(self) -> int:
        return len(self.samples_X1)

    @property
    def x(self) -> np.ndarray:
        return self.d * np.arange(self.n) / self.n

    def total(self, delta: float) -> np.ndarray:
        """Samples of X(x_j; delta)."""
        return self.X0 + delta * self.samples_X1

    def resampled(self, n: int) -> "Envelope":
        if not self.samples_X1.any():
            return flat_envelope(self.d, self.X0, n)
        return sample_envelope(self.d, self.X0, self.width_fraction, n)


def ribbon_profile(x, d: float, width: float) -> np.ndarray:
    """Half-ellipse ribbon profile sqrt(1 - 4((x - d/2)/w)^2) on the ribbon, zero off it."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - 4.0 * ((x - d / 2.0) / width) ** 2
    on = (x > d / 2.0 - width / 2.0) & (x < d / 2.0 + width / 2.0)
    return np.where(on, np.sqrt(np.clip(s, 0.0, None)), 0.0)


def sample_envelope(d: float, X0: float, width_fraction: float, N_x: int) -> Envelope:
    if X0 == 0 or not math.isfinite(X0):
        raise ValueError("X0 must be nonzero (constant-envelope operator would be resonant)")
    if not (0.0 < width_fraction <= 1.0):
        raise ValueError(f"width_fraction must lie in (0, 1], got {width_fraction!r}")
    if N_x < 2 or N_x & (N_x - 1):
        raise ValueError(f"N_x must be a power of two >= 2, got {N_x!r}")
    x = d * np.arange(N_x) / N_x
    X1 = -X0 + ribbon_profile(x, d, width_fraction * d)
    X1.setflags(write=False)
    return Envelope(d=d, X0=X0, width_fraction=width_fraction, samples_X1=X1)


def flat_envelope(d: float, X0: float, N_x: int) -> Envelope:
    """Envelope with X1 identically zero (uniform graphene sheet for every delta)."""
    X1 = np.zeros(N_x)
    X1.setflags(write=False)
    return Envelope(d=d, X0=X0, width_fraction=1.0, samples_X1=X1)
