"""Diffraction efficiencies and the derived R, T, A budget.

For reflected order p, ``e_u_p = gamma_u_p |U_p|^2 / gamma_u_0``; for
transmitted order p, ``e_w_p = gamma_w_p |W_p|^2 / gamma_u_0``. Only
propagating orders carry energy. Absorbance is

    A = 1 - R - (tau_w / tau_u) T,

so in TM (``tau = 1/eps``) the transmitted weight is ``eps_u / eps_w`` and in
TE it is 1. These weights are the ratio of normal energy fluxes per unit
``|W_p|^2`` in the two media, which is what makes A vanish for a lossless
interface in both polarizations.
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np

from .spectral import SpectralGrid
from .units import Polarization


@dataclasses.dataclass(frozen=True)
class Observables:
    p_u: np.ndarray
    e_u_p: np.ndarray
    p_w: np.ndarray
    e_w_p: np.ndarray
    R: float
    T: float
    A: float
    energy_defect: float


def transmitted_weight(grid: SpectralGrid, polarization=None) -> float:
    pol = Polarization.parse(polarization or grid.config.polarization)
    if pol is Polarization.TE:
        return 1.0
    return grid.config.eps_u / grid.config.eps_w


def efficiencies(grid: SpectralGrid, U: np.ndarray, W: np.ndarray, polarization=None,
                 lossless: bool = False) -> Observables:
    """Efficiencies and R, T, A from surface field coefficients.

    ``lossless`` marks a graphene-free run, for which ``energy_defect`` is A
    itself; otherwise it is the definitional identity ``1 - R - wT - A``.
    """
    U = grid.check(U)
    W = grid.check(W)
    gamma0 = grid.gamma_u[grid.zero_index]
    if gamma0.imag != 0 or gamma0.real <= 0:
        raise ValueError("incident order does not propagate (gamma_u_0 = 0)")
    g0 = gamma0.real
    mu = grid.is_propagating_u()
    mw = grid.is_propagating_w()
    e_u = grid.gamma_u[mu].real * np.abs(U[mu]) ** 2 / g0
    e_w = grid.gamma_w[mw].real * np.abs(W[mw]) ** 2 / g0
    R = float(e_u.sum())
    T = float(e_w.sum())
    weight = transmitted_weight(grid, polarization)
    A = 1.0 - R - weight * T
    if R == 0.0 and T == 0.0:
        warnings.warn("zero scattered fields: everything counted as absorbed", RuntimeWarning, stacklevel=2)
    defect = A if lossless else (1.0 - R - weight * T) - A
    return Observables(grid.p[mu].copy(), e_u, grid.p[mw].copy(), e_w, R, T, A, defect)
