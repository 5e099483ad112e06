"""High-order perturbation of envelopes (HOPE).

Expanding ``{U, W}(x; delta) = sum_l {U_l, W_l}(x) delta^l`` in the envelope
``X0 + delta X1`` turns the patterned interface problem into a sequence of
constant-envelope solves:

    order 0:  L0 [U_0, W_0] = (xi, -tau_u nu)
    order l:  L0 [U_l, W_l] = (-A[X1 (tau_w J0 W_{l-1})], B[X1 W_{l-1}])

where ``L0`` is :class:`~hopegraphene.solver.Order0Operator`. The surface
operators A and B act after the pointwise product with X1, so their
second-derivative part differentiates the product. Products with X1 are taken
on the physical grid.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple, Optional

import numpy as np

from .conductivity import Envelope, SigmaPair
from .solver import Order0Operator
from .spectral import SpectralGrid, pointwise_multiply, to_fourier, to_physical

# Pivot ratio below which a Pade denominator system counts as singular.
PADE_PIVOT_RTOL = 1e-13


class DivergenceError(RuntimeError):
    def __init__(self, order: int):
        super().__init__(f"non-finite Taylor coefficient at order {order}")
        self.order = order


def incident_traces(grid: SpectralGrid) -> tuple[np.ndarray, np.ndarray]:
    """Dirichlet and Neumann data of the incident plane wave on z = 0.

    ``xi = -exp(i alpha x)`` and ``nu = i gamma_u exp(i alpha x)``; in the
    quasiperiodic basis both live on the single mode p = 0.
    """
    xi = np.zeros(grid.N_x, dtype=complex)
    nu = np.zeros(grid.N_x, dtype=complex)
    xi[grid.zero_index] = -1.0
    nu[grid.zero_index] = 1j * grid.config.gamma_u
    return xi, nu


def sobolev_norm(field: np.ndarray, s: float = 0.0) -> float:
    """Discrete H^s norm, ``sqrt(sum_p (1 + p^2)^s |F_p|^2)`` over p = -N/2..N/2-1."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    field = np.asarray(field)
    n = field.shape[-1]
    p = np.arange(-n // 2, n // 2)
    weights = (1.0 + p.astype(float) ** 2) ** s
    return float(np.sqrt(np.sum(weights * np.abs(field) ** 2)))


@dataclasses.dataclass(frozen=True, eq=False)
class HopeSeries:
    """Taylor coefficients ``U[l], W[l]`` (shape ``(L + 1, N_x)``) and their right-hand sides."""

    grid: SpectralGrid
    operator: Order0Operator
    U: np.ndarray
    W: np.ndarray
    rhs_Q: np.ndarray
    rhs_R: np.ndarray
    s: float = 0.0

    @property
    def L(self) -> int:
        return self.U.shape[0] - 1

    @property
    def norm_trace(self) -> np.ndarray:
        """Per order, the pair (||U_l||_s, ||W_l||_s)."""
        return np.array([[sobolev_norm(u, self.s), sobolev_norm(w, self.s)] for u, w in zip(self.U, self.W)])

    def residuals(self) -> np.ndarray:
        """Relative residual of each order's constant-envelope system."""
        out = []
        for u, w, q, r in zip(self.U, self.W, self.rhs_Q, self.rhs_R):
            r1, r2 = self.operator.apply(u, w)
            scale = np.linalg.norm(np.concatenate([q, r]))
            err = np.linalg.norm(np.concatenate([r1 - q, r2 - r]))
            out.append(err / scale if scale > 0 else err)
        return np.array(out)


def hope_recursion(grid: SpectralGrid, sigma: SigmaPair, envelope: Envelope, L: int, polarization=None,
                   s: float = 0.0, dealias: bool = False, mu: Optional[float] = None) -> HopeSeries:
    """Build the HOPE Taylor coefficients through order ``L``.

    Args:
        grid: spectral grid of the problem.
        sigma: conductivity pair at the grid's frequency.
        envelope: ribbon envelope; its ``X0`` defines the order-zero operator.
        L: highest Taylor order (>= 0).
        polarization: overrides the grid's config polarization.
        s: Sobolev index used for ``norm_trace``.
        dealias: form X1 products on a 2x zero-padded grid.
        mu: absolute resonance tolerance (default relative, see solver).

    Raises:
        ResonanceError: order-zero operator is singular for some mode.
        DivergenceError: a coefficient overflowed to a non-finite value.
    """
    if L < 0:
        raise ValueError("L must be nonnegative")
    op = Order0Operator.build(grid, sigma, envelope.X0, polarization, mu=mu)
    x1 = envelope.resampled(2 * grid.N_x).samples_X1 if dealias else envelope.samples_X1
    if len(x1) < grid.N_x:
        raise ValueError(f"envelope has {len(x1)} samples, grid has {grid.N_x} modes")
    n = grid.N_x
    U = np.zeros((L + 1, n), dtype=complex)
    W = np.zeros((L + 1, n), dtype=complex)
    Q = np.zeros((L + 1, n), dtype=complex)
    R = np.zeros((L + 1, n), dtype=complex)
    xi, nu = incident_traces(grid)
    Q[0] = xi
    R[0] = -op.tau_u * nu
    active_a = np.any(op.a_sym != 0)
    active_b = np.any(op.b_sym != 0)
    for order in range(L + 1):
        if order > 0:
            prev = W[order - 1]
            if active_a:
                Q[order] = -op.a_sym * pointwise_multiply(x1, op.tau_w * op.j * prev)
            if active_b:
                R[order] = op.b_sym * pointwise_multiply(x1, prev)
        U[order], W[order] = op.solve(Q[order], R[order])
        if not (np.all(np.isfinite(U[order])) and np.all(np.isfinite(W[order]))):
            raise DivergenceError(order)
    return HopeSeries(grid, op, U, W, Q, R, s)


def taylor_sum(series: HopeSeries, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Horner evaluation of the truncated series at ``delta``."""
    return _horner(series.U, delta), _horner(series.W, delta)


def _horner(coeffs: np.ndarray, delta) -> np.ndarray:
    out = np.zeros(coeffs.shape[1:], dtype=complex)
    for c in coeffs[::-1]:
        out = out * delta + c
    return out


def default_split(L: int) -> tuple[int, int]:
    """Numerator/denominator degrees with M + N = L and M = ceil(L / 2)."""
    M = (L + 1) // 2
    return M, L - M


def _solve_full_pivot(A: np.ndarray, b: np.ndarray):
    """Batched Gaussian elimination with full pivoting.

    ``A`` has shape ``(K, n, n)`` and ``b`` shape ``(K, n)``. Returns the
    solutions and the ratio of the smallest to the largest pivot magnitude
    for each system (0 for an exactly singular one).
    """
    A = np.array(A, dtype=complex)
    b = np.array(b, dtype=complex)
    K, n, _ = A.shape
    rows = np.arange(K)
    perm = np.tile(np.arange(n), (K, 1))
    pivots = np.zeros((K, n))
    for k in range(n):
        sub = np.abs(A[:, k:, k:]).reshape(K, -1)
        flat = np.argmax(sub, axis=1)
        ri = k + flat // (n - k)
        ci = k + flat % (n - k)
        # row swap k <-> ri
        rk = A[rows, k].copy()
        A[rows, k] = A[rows, ri]
        A[rows, ri] = rk
        bk = b[rows, k].copy()
        b[rows, k] = b[rows, ri]
        b[rows, ri] = bk
        # column swap k <-> ci
        ck = A[rows, :, k].copy()
        A[rows, :, k] = A[rows, :, ci]
        A[rows, :, ci] = ck
        pk = perm[rows, k].copy()
        perm[rows, k] = perm[rows, ci]
        perm[rows, ci] = pk
        piv = A[:, k, k]
        pivots[:, k] = np.abs(piv)
        safe = np.where(piv == 0, 1.0, piv)
        if k + 1 < n:
            factor = A[:, k + 1:, k] / safe[:, None]
            A[:, k + 1:, k:] -= factor[:, :, None] * A[:, k, None, k:]
            b[:, k + 1:] -= factor * b[:, k, None]
    y = np.zeros((K, n), dtype=complex)
    diag = np.where(pivots == 0, 1.0, np.diagonal(A, axis1=1, axis2=2))
    for k in range(n - 1, -1, -1):
        acc = b[:, k] - np.einsum("ij,ij->i", A[:, k, k + 1:], y[:, k + 1:])
        y[:, k] = acc / diag[:, k]
    x = np.zeros_like(y)
    x[rows[:, None], perm] = y
    top = pivots.max(axis=1)
    ratio = np.where(top > 0, pivots.min(axis=1) / np.where(top > 0, top, 1.0), 0.0)
    return x, ratio


class PadeTable(NamedTuple):
    num: np.ndarray       # (M + 1, K)
    den: np.ndarray       # (N + 1, K), den[0] == 1
    fallback: np.ndarray  # (K,) bool, True where the Taylor polynomial must be used


def _pade_block(coeffs: np.ndarray, M: int, N: int):
    """Denominator of the [M/N] approximant per column, with its pivot ratio."""
    K = coeffs.shape[1]

    def c(i):
        return coeffs[i] if i >= 0 else np.zeros(K, dtype=complex)

    den = np.zeros((N + 1, K), dtype=complex)
    den[0] = 1.0
    if N == 0:
        return den, np.ones(K)
    T = np.empty((K, N, N), dtype=complex)
    for i in range(N):
        for k in range(N):
            T[:, i, k] = c(M + i - k)
    rhs = -np.stack([c(M + 1 + i) for i in range(N)], axis=1)
    sol, ratio = _solve_full_pivot(T, rhs)
    den[1:] = sol.T
    return den, ratio


def _consistent(coeffs: np.ndarray, den: np.ndarray, M: int, L: int, tol: float = 1e-10) -> np.ndarray:
    """True where ``den * series`` has no terms of order M+1..L (relative to term sizes)."""
    N = den.shape[0] - 1
    ok = np.ones(coeffs.shape[1], dtype=bool)
    for m in range(M + 1, L + 1):
        terms = np.stack([den[n] * coeffs[m - n] for n in range(min(m, N) + 1)])
        ok &= np.abs(terms.sum(axis=0)) <= tol * np.abs(terms).sum(axis=0) + 1e-300
    return ok


def pade_coefficients(coeffs: np.ndarray, M: int, N: int, rtol: float = PADE_PIVOT_RTOL) -> PadeTable:
    """[M/N] Pade coefficients for each column of a Taylor table ``coeffs[l, k]``.

    The denominator solves ``sum_{n=0..N} b_n c_{m-n} = 0`` for ``m = M+1..M+N``
    with ``b_0 = 1``; the numerator is ``a_m = sum_{n<=m} b_n c_{m-n}``.
    A column whose system is numerically singular (pivot ratio below ``rtol``)
    is retried one step down the diagonal, [M-1/N-1] and so on, in the spirit
    of SVD-based robust Pade: rank deficiency means the data is described by
    fewer poles. The first well-conditioned block is kept. If the descent
    reaches a pure polynomial (N = 0) it is kept only when it reproduces the
    series through order M + N, otherwise the column is flagged for Taylor
    fallback.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    L = coeffs.shape[0] - 1
    if M < 0 or N < 0 or M + N > L:
        raise ValueError(f"need M, N >= 0 and M + N <= L={L}, got M={M}, N={N}")
    K = coeffs.shape[1]
    order = M + N
    den = np.zeros((N + 1, K), dtype=complex)
    den[0] = 1.0
    done = np.zeros(K, dtype=bool)
    for step in range(min(M, N) + 1):
        todo = np.flatnonzero(~done)
        if todo.size == 0:
            break
        m, n = M - step, N - step
        sub = coeffs[:, todo]
        d, ratio = _pade_block(sub, m, n)
        good = ratio >= rtol
        if n == 0:
            good &= _consistent(sub, d, m, order)
        idx = todo[good]
        den[:, idx] = 0.0
        den[: n + 1, idx] = d[:, good]
        done[idx] = True
    if N > M and not done.all():
        # below the diagonal, [0/N-M] is the last candidate on this path
        todo = np.flatnonzero(~done)
        for n in range(N - M - 1, -1, -1):
            sub = coeffs[:, todo]
            d, ratio = _pade_block(sub, 0, n)
            good = ratio >= rtol
            if n == 0:
                good &= _consistent(sub, d, 0, order)
            idx = todo[good]
            den[:, idx] = 0.0
            den[: n + 1, idx] = d[:, good]
            done[idx] = True
            todo = np.flatnonzero(~done)
            if todo.size == 0:
                break
    fallback = ~done
    den[:, fallback] = 0.0
    den[0, fallback] = 1.0
    num = np.zeros((M + 1, K), dtype=complex)
    for m in range(M + 1):
        for n in range(min(m, N) + 1):
            num[m] += den[n] * coeffs[m - n]
    return PadeTable(num, den, fallback)


class PadeResult(NamedTuple):
    U: np.ndarray
    W: np.ndarray
    fallbacks: int


def _pade_eval(table: PadeTable, coeffs: np.ndarray, delta: float):
    num = _horner(table.num, delta)
    den = _horner(table.den, delta)
    fallback = table.fallback | (den == 0)
    taylor = _horner(coeffs, delta)
    value = np.where(fallback, taylor, num / np.where(den == 0, 1.0, den))
    return value, int(fallback.sum())


def _resolve_split(L: int, M: Optional[int], N: Optional[int]) -> tuple[int, int]:
    if M is None and N is None:
        return default_split(L)
    if M is None:
        return L - N, N
    if N is None:
        return M, L - M
    return M, N


def pade_sum_many(series: HopeSeries, deltas, M: Optional[int] = None, N: Optional[int] = None,
                  pointwise: bool = False, rtol: float = PADE_PIVOT_RTOL) -> list[PadeResult]:
    """Pade sums at several deltas from a single set of approximant tables."""
    M, N = _resolve_split(series.L, M, N)
    grid = series.grid
    cu = to_physical(grid, series.U) if pointwise else series.U
    cw = to_physical(grid, series.W) if pointwise else series.W
    tu = pade_coefficients(cu, M, N, rtol)
    tw = pade_coefficients(cw, M, N, rtol)
    out = []
    for delta in np.atleast_1d(deltas):
        U, fu = _pade_eval(tu, cu, delta)
        W, fw = _pade_eval(tw, cw, delta)
        if pointwise:
            U, W = to_fourier(grid, U), to_fourier(grid, W)
        out.append(PadeResult(U, W, fu + fw))
    return out


def pade_sum(series: HopeSeries, delta: float, M: Optional[int] = None, N: Optional[int] = None,
             pointwise: bool = False, rtol: float = PADE_PIVOT_RTOL) -> PadeResult:
    """Sum the series by [M/N] Pade approximants, one per Fourier coefficient.

    With ``pointwise=True`` the approximants are formed per physical
    gridpoint instead. ``fallbacks`` counts coefficients (or gridpoints) of
    both fields that fell back to Taylor summation.
    """
    return pade_sum_many(series, [delta], M, N, pointwise, rtol)[0]


def norm_ratios(norms: np.ndarray) -> np.ndarray:
    """Successive ratios ``n[l+1] / n[l]``; NaN where the denominator vanishes."""
    norms = np.asarray(norms, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = norms[1:] / norms[:-1]
    return np.where(norms[:-1] > 0, ratios, math.nan)
