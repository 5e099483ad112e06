"""Per-wavenumber solves of the constant-envelope (order-zero) interface system.

With a constant envelope ``X0`` the surface system

    [ I          -I + A X0 tau_w J0 ] [U]   [Q]
    [ tau_u G0    tau_w J0 - B X0   ] [W] = [R]

is diagonal in Fourier space, so each mode p is an independent 2x2 system
(A = 0 in TE, B = 0 in TM). Its determinant is ``Delta_p`` and the closed-form
inverse is used directly.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from .conductivity import SigmaPair
from .spectral import SpectralGrid, symbol_A, symbol_B
from .units import Polarization

# Default resonance tolerance, relative per mode to the sum of the magnitudes
# of the terms making up Delta_p (a cancellation measure, unaffected by the
# p^2 / p^4 growth of the tail).
RESONANCE_RTOL = 1e-10


class ResonanceError(RuntimeError):
    """Raised when some mode makes the order-zero operator (nearly) singular."""

    def __init__(self, p: int, value: float, mu: float):
        super().__init__(f"mode p={p} is resonant: |Delta_p|={value:.3e} below tolerance {mu:.3e}")
        self.p = p
        self.value = value
        self.mu = mu


@dataclasses.dataclass(frozen=True)
class DeterminantProfile:
    delta_p: np.ndarray
    min_abs: float
    argmin_p: int
    polarization: Polarization
    cases: Optional[np.ndarray] = None


def _tm_weights(grid: SpectralGrid, tau_u, tau_w):
    cfg = grid.config
    return (1.0 / cfg.eps_u if tau_u is None else tau_u,
            1.0 / cfg.eps_w if tau_w is None else tau_w)


def _profile(grid, delta_p, scale, pol, mu, rtol, cases=None) -> DeterminantProfile:
    mags = np.abs(delta_p)
    i = int(np.argmin(mags))
    profile = DeterminantProfile(delta_p, float(mags[i]), int(grid.p[i]), pol, cases)
    limit = rtol * scale if mu is None else np.full_like(mags, mu)
    bad = mags <= limit
    if bad.any():
        k = int(np.argmax(bad))
        raise ResonanceError(int(grid.p[k]), float(mags[k]), float(limit[k]))
    return profile


def delta_te(grid: SpectralGrid, sigma: SigmaPair, X0: float) -> np.ndarray:
    return -1j * grid.gamma_u - 1j * grid.gamma_w - symbol_B(grid, sigma) * X0


def delta_tm(grid: SpectralGrid, sigma: SigmaPair, X0: float, tau_u=None, tau_w=None) -> np.ndarray:
    tau_u, tau_w = _tm_weights(grid, tau_u, tau_w)
    g = -1j * grid.gamma_u
    j = -1j * grid.gamma_w
    return tau_u * g + tau_w * j - tau_u * tau_w * symbol_A(grid, sigma) * X0 * g * j


def determinant_te(grid: SpectralGrid, sigma: SigmaPair, X0: float, mu: Optional[float] = None,
                   rtol: float = RESONANCE_RTOL) -> DeterminantProfile:
    """TE determinant ``-i gamma_u - i gamma_w - i k0 X0 (sigma_loc + sigma_nloc alpha_p^2)``.

    Raises:
        ResonanceError: if some ``|Delta_p|`` does not exceed ``mu``, or by
            default ``rtol`` times the summed magnitudes of its three terms.
    """
    scale = np.abs(grid.gamma_u) + np.abs(grid.gamma_w) + np.abs(symbol_B(grid, sigma) * X0)
    return _profile(grid, delta_te(grid, sigma, X0), scale, Polarization.TE, mu, rtol)


def determinant_tm(grid: SpectralGrid, sigma: SigmaPair, X0: float, tau_u=None, tau_w=None,
                   mu: Optional[float] = None, rtol: float = RESONANCE_RTOL) -> DeterminantProfile:
    """TM determinant ``tau_u G0 + tau_w J0 - tau_u tau_w A X0 G0 J0`` per mode.

    The returned profile carries ``cases`` from :func:`tm_sign_cases`.
    """
    d = delta_tm(grid, sigma, X0, tau_u, tau_w)
    tu, tw = _tm_weights(grid, tau_u, tau_w)
    gu, gw = np.abs(grid.gamma_u), np.abs(grid.gamma_w)
    scale = tu * gu + tw * gw + tu * tw * np.abs(symbol_A(grid, sigma) * X0) * gu * gw
    return _profile(grid, d, scale, Polarization.TM, mu, rtol, cases=tm_sign_cases(grid))


def tm_sign_cases(grid: SpectralGrid) -> np.ndarray:
    """Classify each mode by the propagating/evanescent character of gamma_u, gamma_w.

    0: Rayleigh singularity (some gamma is zero); 1: both evanescent;
    2: upper evanescent, lower propagating; 3: upper propagating, lower
    evanescent; 4: both propagating. In cases 1 and 4 ``Re(i Delta)`` has a
    definite sign, in 2 and 3 ``Im(i Delta)`` is positive.
    """
    gu, gw = grid.gamma_u, grid.gamma_w
    u_prop = gu.imag == 0
    w_prop = gw.imag == 0
    cases = np.where(u_prop, np.where(w_prop, 4, 3), np.where(w_prop, 2, 1))
    return np.where((gu == 0) | (gw == 0), 0, cases)


def _select(grid: SpectralGrid, p):
    if p is None:
        return slice(None)
    return np.asarray(p) + grid.N_x // 2


def solve_mode_te(grid: SpectralGrid, sigma: SigmaPair, X0: float, q, r, p=None):
    """Closed-form TE solve for mode(s) ``p`` (all modes when ``p`` is None).

    Returns ``(U_p, W_p)`` with ``U_p = ((-i gamma_w - B X0) Q_p + R_p) / Delta_p``
    and ``W_p = (i gamma_u Q_p + R_p) / Delta_p``.
    """
    sel = _select(grid, p)
    gu = grid.gamma_u[sel]
    gw = grid.gamma_w[sel]
    b = symbol_B(grid, sigma)[sel]
    delta = -1j * gu - 1j * gw - b * X0
    if np.any(delta == 0):
        raise ResonanceError(int(np.asarray(grid.p[sel]).ravel()[np.argmin(np.abs(delta))]), 0.0, 0.0)
    q = np.asarray(q)
    r = np.asarray(r)
    U = ((-1j * gw - b * X0) * q + r) / delta
    W = (1j * gu * q + r) / delta
    return U, W


def solve_mode_tm(grid: SpectralGrid, sigma: SigmaPair, X0: float, q, r, p=None, tau_u=None, tau_w=None):
    """Closed-form TM solve for mode(s) ``p`` (all modes when ``p`` is None).

    ``U_p = (-tau_w i gamma_w Q_p + (1 + A X0 tau_w i gamma_w) R_p) / Delta_p`` and
    ``W_p = (tau_u i gamma_u Q_p + R_p) / Delta_p``.
    """
    tau_u, tau_w = _tm_weights(grid, tau_u, tau_w)
    sel = _select(grid, p)
    gu = grid.gamma_u[sel]
    gw = grid.gamma_w[sel]
    a = symbol_A(grid, sigma)[sel]
    delta = -1j * tau_u * gu - 1j * tau_w * gw + tau_u * tau_w * a * X0 * gu * gw
    if np.any(delta == 0):
        raise ResonanceError(int(np.asarray(grid.p[sel]).ravel()[np.argmin(np.abs(delta))]), 0.0, 0.0)
    q = np.asarray(q)
    r = np.asarray(r)
    U = (-tau_w * 1j * gw * q + (1.0 + a * X0 * tau_w * 1j * gw) * r) / delta
    W = (tau_u * 1j * gu * q + r) / delta
    return U, W


@dataclasses.dataclass(frozen=True, eq=False)
class Order0Operator:
    """The constant-envelope operator on one grid: forward action and inverse.

    ``a_sym``/``b_sym`` are the Fourier symbols of A and B for the active
    polarization (the inactive one is identically zero).
    """

    grid: SpectralGrid
    sigma: SigmaPair
    X0: float
    polarization: Polarization
    tau_u: float
    tau_w: float
    a_sym: np.ndarray
    b_sym: np.ndarray
    profile: DeterminantProfile

    @classmethod
    def build(cls, grid: SpectralGrid, sigma: SigmaPair, X0: float, polarization=None,
              mu: Optional[float] = None) -> "Order0Operator":
        pol = Polarization.parse(polarization or grid.config.polarization)
        zeros = np.zeros(grid.N_x, dtype=complex)
        if pol is Polarization.TE:
            profile = determinant_te(grid, sigma, X0, mu=mu)
            return cls(grid, sigma, X0, pol, 1.0, 1.0, zeros, symbol_B(grid, sigma), profile)
        profile = determinant_tm(grid, sigma, X0, mu=mu)
        cfg = grid.config
        return cls(grid, sigma, X0, pol, 1.0 / cfg.eps_u, 1.0 / cfg.eps_w, symbol_A(grid, sigma), zeros, profile)

    @property
    def g(self) -> np.ndarray:
        return -1j * self.grid.gamma_u

    @property
    def j(self) -> np.ndarray:
        return -1j * self.grid.gamma_w

    def apply(self, U, W):
        """Forward action of the 2x2 block operator on coefficient arrays."""
        row1 = U - W + self.a_sym * self.X0 * self.tau_w * self.j * W
        row2 = self.tau_u * self.g * U + self.tau_w * self.j * W - self.b_sym * self.X0 * W
        return row1, row2

    def solve(self, Q, R):
        if self.polarization is Polarization.TE:
            return solve_mode_te(self.grid, self.sigma, self.X0, Q, R)
        return solve_mode_tm(self.grid, self.sigma, self.X0, Q, R, tau_u=self.tau_u, tau_w=self.tau_w)


def solve_order0(grid: SpectralGrid, sigma: SigmaPair, X0: float, polarization, rhs, mu=None):
    """Solve the order-zero system for ``rhs = (Q, R)`` after checking nonresonance."""
    op = Order0Operator.build(grid, sigma, X0, polarization, mu=mu)
    Q, R = rhs
    return op.solve(grid.check(Q), grid.check(R))
