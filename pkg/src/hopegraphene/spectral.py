"""Quasiperiodic Fourier lattice with flat-interface DNO multipliers and transforms.

A surface field is stored as a complex array of its coefficients
``F_p, p = -N/2 .. N/2 - 1`` (ascending p) in the basis ``exp(i alpha_p x)``.
The FFT wrap-around order never leaves this module.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .conductivity import SigmaPair
from .units import PhysicalConfig


class GridError(ValueError):
    pass


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def vertical_wavenumber(k: float, alpha_p: np.ndarray) -> np.ndarray:
    """Outgoing branch: sqrt(k^2 - a^2) when propagating, i sqrt(a^2 - k^2) otherwise."""
    alpha_p = np.asarray(alpha_p, dtype=float)
    diff = k * k - alpha_p * alpha_p
    prop = alpha_p * alpha_p <= k * k
    out = np.where(prop, np.sqrt(np.abs(diff)) + 0j, 1j * np.sqrt(np.abs(diff)))
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralGrid:
    config: PhysicalConfig
    N_x: int
    p: np.ndarray
    x: np.ndarray
    alpha_p: np.ndarray
    gamma_u: np.ndarray
    gamma_w: np.ndarray
    prop_u: np.ndarray
    prop_w: np.ndarray

    @property
    def d(self) -> float:
        return self.config.d

    @property
    def k0(self) -> float:
        return self.config.k0

    @property
    def zero_index(self) -> int:
        """Array position of p = 0."""
        return self.N_x // 2

    def index_of(self, p: int) -> int:
        if not -self.N_x // 2 <= p < self.N_x // 2:
            raise IndexError(f"mode {p} outside the truncated lattice")
        return p + self.N_x // 2

    def is_propagating_u(self) -> np.ndarray:
        return np.isin(self.p, self.prop_u)

    def is_propagating_w(self) -> np.ndarray:
        return np.isin(self.p, self.prop_w)

    def check(self, field: np.ndarray) -> np.ndarray:
        field = np.asarray(field)
        if field.shape[-1] != self.N_x:
            raise GridError(f"field has {field.shape[-1]} modes, grid has {self.N_x}")
        return field


def _propagating(alpha: float, d: float, k: float) -> tuple[int, int]:
    """Inclusive range of p with |alpha + 2 pi p / d| <= k."""
    step = 2.0 * math.pi / d
    lo = math.ceil((-k - alpha) / step - 1e-12)
    hi = math.floor((k - alpha) / step + 1e-12)
    return lo, hi


def build_grid(config: PhysicalConfig, N_x: int) -> SpectralGrid:
    if not _is_pow2(N_x):
        raise GridError(f"N_x must be a power of two, got {N_x}")
    if N_x < 8:
        raise GridError(f"N_x must be at least 8, got {N_x}")
    p = np.arange(-N_x // 2, N_x // 2)
    alpha_p = config.alpha + (2.0 * math.pi / config.d) * p
    needed = 0
    for k in (config.ku, config.kw):
        lo, hi = _propagating(config.alpha, config.d, k)
        needed = max(needed, 2 * max(-lo, hi + 1))
    if needed > N_x:
        minimum = max(8, 1 << (needed - 1).bit_length())
        raise GridError(f"N_x={N_x} cannot hold all propagating modes; need N_x >= {minimum}")
    gamma_u = vertical_wavenumber(config.ku, alpha_p)
    gamma_w = vertical_wavenumber(config.kw, alpha_p)
    prop_u = p[alpha_p**2 <= config.ku**2]
    prop_w = p[alpha_p**2 <= config.kw**2]
    x = config.d * np.arange(N_x) / N_x
    for arr in (p, x, alpha_p, gamma_u, gamma_w, prop_u, prop_w):
        arr.setflags(write=False)
    return SpectralGrid(config, N_x, p, x, alpha_p, gamma_u, gamma_w, prop_u, prop_w)


def to_physical(grid: SpectralGrid, coeffs: np.ndarray) -> np.ndarray:
    """Samples ``sum_p F_p exp(i alpha_p x_j)`` at the gridpoints."""
    coeffs = grid.check(coeffs)
    n = grid.N_x
    periodic = np.fft.ifft(np.fft.ifftshift(coeffs, axes=-1), axis=-1) * n
    return periodic * np.exp(1j * grid.config.alpha * grid.x)


def to_fourier(grid: SpectralGrid, samples: np.ndarray) -> np.ndarray:
    samples = grid.check(samples)
    n = grid.N_x
    periodic = samples * np.exp(-1j * grid.config.alpha * grid.x)
    return np.fft.fftshift(np.fft.fft(periodic, axis=-1), axes=-1) / n


def mode(grid: SpectralGrid, p: int, amplitude: complex = 1.0) -> np.ndarray:
    out = np.zeros(grid.N_x, dtype=complex)
    out[grid.index_of(p)] = amplitude
    return out


def dno_upper(grid: SpectralGrid, U: np.ndarray) -> np.ndarray:
    """G0[U]: coefficient-wise ``-i gamma_u_p U_p``."""
    return -1j * grid.gamma_u * grid.check(U)


def dno_lower(grid: SpectralGrid, W: np.ndarray) -> np.ndarray:
    """J0[W]: coefficient-wise ``-i gamma_w_p W_p``."""
    return -1j * grid.gamma_w * grid.check(W)


def symbol_A(grid: SpectralGrid, sigma: SigmaPair) -> np.ndarray:
    """Fourier symbol of the TM jump coefficient (sigma_loc + sigma_nloc alpha_p^2) / (i k0)."""
    return sigma.symbol(grid.alpha_p) / (1j * grid.k0)


def symbol_B(grid: SpectralGrid, sigma: SigmaPair) -> np.ndarray:
    """Fourier symbol of the TE jump coefficient (i k0)(sigma_loc + sigma_nloc alpha_p^2)."""
    return (1j * grid.k0) * sigma.symbol(grid.alpha_p)


def apply_A(grid: SpectralGrid, sigma: SigmaPair, field: np.ndarray) -> np.ndarray:
    return symbol_A(grid, sigma) * grid.check(field)


def apply_B(grid: SpectralGrid, sigma: SigmaPair, field: np.ndarray) -> np.ndarray:
    return symbol_B(grid, sigma) * grid.check(field)


def pointwise_multiply(envelope_samples: np.ndarray, field: np.ndarray) -> np.ndarray:
    """Multiply a field by a d-periodic function sampled on the physical grid.

    With ``len(envelope_samples) == N_x`` the product is formed on the bare grid
    (aliasing included, consistent with the collocation matrix). A longer
    power-of-two sample vector, e.g. ``2 N_x``, zero-pads the field to that
    grid first and truncates back to ``N_x`` modes afterwards.

    Only the periodic part of the basis enters, so no grid object is needed:
    the Bloch factor ``exp(i alpha x)`` cancels between the two transforms.
    """
    envelope_samples = np.asarray(envelope_samples)
    field = np.asarray(field)
    n = field.shape[-1]
    m = envelope_samples.shape[-1]
    if m < n or m % n or not _is_pow2(m // n):
        raise GridError(f"envelope has {m} samples, field has {n} modes")
    if m == n:
        padded = field
    else:
        padded = np.zeros(field.shape[:-1] + (m,), dtype=complex)
        padded[..., m // 2 - n // 2: m // 2 + n // 2] = field
    physical = np.fft.ifft(np.fft.ifftshift(padded, axes=-1), axis=-1)
    product = np.fft.fftshift(np.fft.fft(physical * envelope_samples, axis=-1), axes=-1)
    if m == n:
        return product
    return product[..., m // 2 - n // 2: m // 2 + n // 2]


def convolution_matrix(envelope_samples: np.ndarray, n: int) -> np.ndarray:
    """Matrix C with ``C @ F == pointwise_multiply(envelope_samples, F)`` for n-mode F.

    ``C[p, q] = E_hat[(p - q) mod m]`` where ``E_hat`` are the DFT coefficients
    of the ``m`` envelope samples.
    """
    envelope_samples = np.asarray(envelope_samples)
    m = envelope_samples.shape[-1]
    if m < n or m % n:
        raise GridError(f"envelope has {m} samples, field has {n} modes")
    e_hat = np.fft.fft(envelope_samples) / m
    p = np.arange(-n // 2, n // 2)
    return e_hat[(p[:, None] - p[None, :]) % m]


def l2_norm(field: np.ndarray) -> float:
    """Discrete L2 norm (square root of sum |F_p|^2)."""
    return float(np.sqrt(np.sum(np.abs(field) ** 2)))
