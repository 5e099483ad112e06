"""Direct dense solve of the patterned interface system at a fixed delta.

Unknowns are ordered ``[U_{-N/2} .. U_{N/2-1}, W_{-N/2} .. W_{N/2-1}]``.
Multiplication by the envelope X(x; delta) on the gridpoints is the
(circulant, for an N_x-sample envelope) convolution matrix of its DFT
coefficients, which is exactly the collocation condition written in the
Fourier basis. A and B act to the left of that matrix.
"""

from __future__ import annotations

import dataclasses
import warnings
from typing import Optional

import numpy as np
import scipy.linalg

from .conductivity import Envelope, SigmaPair
from .hope import incident_traces
from .spectral import SpectralGrid, convolution_matrix, pointwise_multiply, symbol_A, symbol_B
from .units import Polarization

# Reciprocal condition number below which the system is reported singular.
RCOND_MIN = 1e-14


class SingularSystemError(RuntimeError):
    def __init__(self, rcond: float):
        super().__init__(
            f"collocation matrix is numerically singular (rcond={rcond:.2e}); "
            "check for resonance or pathological parameters")
        self.rcond = rcond


@dataclasses.dataclass(frozen=True, eq=False)
class DenseSystem:
    grid: SpectralGrid
    matrix: np.ndarray
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return self.grid.N_x


def _weights(grid: SpectralGrid, pol: Polarization):
    if pol is Polarization.TE:
        return 1.0, 1.0
    return 1.0 / grid.config.eps_u, 1.0 / grid.config.eps_w


def _symbols(grid, sigma, pol):
    zeros = np.zeros(grid.N_x, dtype=complex)
    if pol is Polarization.TE:
        return zeros, symbol_B(grid, sigma)
    return symbol_A(grid, sigma), zeros


def assemble(grid: SpectralGrid, sigma: SigmaPair, envelope: Envelope, delta: float,
             polarization=None) -> DenseSystem:
    pol = Polarization.parse(polarization or grid.config.polarization)
    n = grid.N_x
    tau_u, tau_w = _weights(grid, pol)
    a_sym, b_sym = _symbols(grid, sigma, pol)
    g = -1j * grid.gamma_u
    j = -1j * grid.gamma_w
    X = convolution_matrix(envelope.total(delta), n)
    eye = np.eye(n)
    matrix = np.empty((2 * n, 2 * n), dtype=complex)
    matrix[:n, :n] = eye
    matrix[:n, n:] = -eye + (a_sym[:, None] * X) * (tau_w * j)[None, :]
    matrix[n:, :n] = np.diag(tau_u * g)
    matrix[n:, n:] = np.diag(tau_w * j) - b_sym[:, None] * X
    xi, nu = incident_traces(grid)
    rhs = np.concatenate([xi, -tau_u * nu])
    return DenseSystem(grid, matrix, rhs)


def apply_operator(grid: SpectralGrid, sigma: SigmaPair, envelope: Envelope, delta: float, U, W,
                   polarization=None):
    """Matrix-free action of the patterned operator, products taken via FFT."""
    pol = Polarization.parse(polarization or grid.config.polarization)
    tau_u, tau_w = _weights(grid, pol)
    a_sym, b_sym = _symbols(grid, sigma, pol)
    g = -1j * grid.gamma_u
    j = -1j * grid.gamma_w
    X = envelope.total(delta)
    row1 = U - W + a_sym * pointwise_multiply(X, tau_w * j * W)
    row2 = tau_u * g * U + tau_w * j * W - b_sym * pointwise_multiply(X, W)
    return row1, row2


def solve(system: DenseSystem, rcond_min: Optional[float] = RCOND_MIN):
    """LU solve; returns ``(U, W)`` coefficient arrays.

    Raises:
        SingularSystemError: estimated reciprocal 1-norm condition number
            below ``rcond_min``.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(system.matrix, check_finite=True)
        except scipy.linalg.LinAlgWarning:
            raise SingularSystemError(0.0) from None
    if rcond_min is not None:
        anorm = np.linalg.norm(system.matrix, 1)
        gecon, = scipy.linalg.get_lapack_funcs(("gecon",), (lu,))
        rcond, info = gecon(lu, anorm, norm="1")
        if info != 0 or not rcond > rcond_min:
            raise SingularSystemError(float(rcond))
    x = scipy.linalg.lu_solve((lu, piv), system.rhs)
    n = system.n
    return x[:n], x[n:]


def relative_residual(system: DenseSystem, U, W) -> float:
    x = np.concatenate([U, W])
    return float(np.linalg.norm(system.matrix @ x - system.rhs) / np.linalg.norm(system.rhs))
