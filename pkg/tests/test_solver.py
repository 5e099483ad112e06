import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hopegraphene.conductivity import GrapheneParams, SigmaPair, sigma_pair
from hopegraphene.hope import incident_traces
from hopegraphene.solver import (Order0Operator, ResonanceError, delta_te, delta_tm, determinant_te,
                                 determinant_tm, solve_mode_te, solve_mode_tm, solve_order0, tm_sign_cases)
from hopegraphene.spectral import build_grid
from hopegraphene.units import THZ, UM, Constants, PhysicalConfig

RNG = np.random.default_rng(11)


def ribbon_grid(pol="TM", f=2 * THZ, d=8 * UM, N_x=64, theta=0.0):
    return build_grid(PhysicalConfig(3.0, 4.0, d, theta, f, pol), N_x)


def residual(op, U, W, Q, R):
    """Worst per-mode normwise backward error |M x - b| / (|M| |x| + |b|)."""
    r1, r2 = op.apply(U, W)
    err = np.hypot(np.abs(r1 - Q), np.abs(r2 - R))
    m11, m21 = 1.0, np.abs(op.tau_u * op.g)
    m12 = np.abs(-1 + op.a_sym * op.X0 * op.tau_w * op.j)
    m22 = np.abs(op.tau_w * op.j - op.b_sym * op.X0)
    norm_m = np.sqrt(m11**2 + m12**2 + m21**2 + m22**2)
    scale = norm_m * np.hypot(np.abs(U), np.abs(W)) + np.hypot(np.abs(Q), np.abs(R))
    return float(np.max(err / scale))


@pytest.mark.parametrize("pol", ["TE", "TM"])
@pytest.mark.parametrize("nonlocal_", [False, True])
def test_random_rhs_residual(graphene, pol, nonlocal_):
    grid = ribbon_grid(pol, theta=0.3)
    sigma = sigma_pair(graphene.with_nonlocal(nonlocal_), grid.config.f)
    op = Order0Operator.build(grid, sigma, 1.0)
    Q = RNG.normal(size=64) + 1j * RNG.normal(size=64)
    R = RNG.normal(size=64) + 1j * RNG.normal(size=64)
    U, W = op.solve(Q, R)
    assert residual(op, U, W, Q, R) < 1e-14


@pytest.mark.parametrize("solve", [solve_mode_te, solve_mode_tm])
def test_zero_rhs(graphene, solve):
    grid = ribbon_grid()
    U, W = solve(grid, sigma_pair(graphene, 2 * THZ), 1.0, np.zeros(64), np.zeros(64))
    assert not U.any() and not W.any()


def test_first_row_identity(graphene):
    grid = ribbon_grid("TE")
    sigma = sigma_pair(graphene.with_nonlocal(True), 2 * THZ)
    Q = RNG.normal(size=64) + 0j
    R = RNG.normal(size=64) + 0j
    U, W = solve_mode_te(grid, sigma, 1.0, Q, R)
    np.testing.assert_allclose(U - W, Q, atol=1e-13)


def test_single_mode_selection(graphene):
    grid = ribbon_grid("TM")
    sigma = sigma_pair(graphene, 2 * THZ)
    Q = RNG.normal(size=64) + 0j
    R = RNG.normal(size=64) + 0j
    U, W = solve_mode_tm(grid, sigma, 1.0, Q, R)
    u3, w3 = solve_mode_tm(grid, sigma, 1.0, Q[grid.index_of(3)], R[grid.index_of(3)], p=3)
    assert u3 == pytest.approx(U[grid.index_of(3)], rel=1e-15)
    assert w3 == pytest.approx(W[grid.index_of(3)], rel=1e-15)


@pytest.mark.parametrize("pol", ["TE", "TM"])
def test_fresnel_transmission(pol):
    grid = ribbon_grid(pol)
    cfg = grid.config
    xi, nu = incident_traces(grid)
    U, W = solve_order0(grid, SigmaPair.zero(), 1.0, pol, (xi, -cfg.tau_u * nu))
    tu, tw = cfg.tau_u * cfg.ku, cfg.tau_w * cfg.kw
    t = 2 * tu / (tu + tw)
    assert W[grid.zero_index] == pytest.approx(t, rel=1e-14)
    # reflected amplitude of the scattered field; U - W = xi on mode 0
    assert U[grid.zero_index] == pytest.approx(t - 1, rel=1e-13)
    others = np.delete(np.arange(64), grid.zero_index)
    assert not U[others].any() and not W[others].any()


def test_no_graphene_determinants():
    grid = ribbon_grid()
    zero = SigmaPair.zero()
    np.testing.assert_allclose(delta_te(grid, zero, 1.0), -1j * (grid.gamma_u + grid.gamma_w))
    cfg = grid.config
    np.testing.assert_allclose(delta_tm(grid, zero, 1.0), -1j * (cfg.tau_u * grid.gamma_u + cfg.tau_w * grid.gamma_w))


@pytest.mark.parametrize("f", np.linspace(0.5, 12, 9) * THZ)
@pytest.mark.parametrize("nonlocal_", [False, True])
def test_te_determinant_real_part_positive(graphene, f, nonlocal_):
    grid = ribbon_grid("TE", f=f, N_x=128)
    d = delta_te(grid, sigma_pair(graphene.with_nonlocal(nonlocal_), f), 1.0)
    assert np.all((1j * d).real > 0)


@pytest.mark.parametrize("f", np.linspace(0.5, 12, 9) * THZ)
@pytest.mark.parametrize("nonlocal_", [False, True])
def test_tm_determinant_sign_cases(graphene, f, nonlocal_):
    grid = ribbon_grid("TM", f=f, N_x=128, theta=0.2)
    prof = determinant_tm(grid, sigma_pair(graphene.with_nonlocal(nonlocal_), f), 1.0)
    i_delta = 1j * prof.delta_p
    cases = prof.cases
    assert prof.min_abs > 0
    assert np.all(i_delta[cases == 4].real > 0)
    assert np.all(i_delta[(cases == 2) | (cases == 3)].imag > 0)
    assert np.all(i_delta[cases == 1] != 0)


def test_rayleigh_singularity_case(graphene):
    # choose f so that p = 1 is exactly grazing in the upper medium at normal incidence
    d = 8 * UM
    f = Constants.c0 / (d * math.sqrt(3.0))
    cfg = PhysicalConfig(3.0, 4.0, d, 0.0, f, "TM")
    grid = build_grid(cfg, 32)
    i = grid.index_of(1)
    assert grid.gamma_u[i] == pytest.approx(0, abs=1e-6 * cfg.ku)
    sigma = sigma_pair(graphene, f)
    d_p = delta_tm(grid, sigma, 1.0)[i]
    expected = -1j * cfg.tau_w * grid.gamma_w[i] - cfg.tau_u * grid.gamma_u[i] * 1j * (
        1 - cfg.tau_w * (sigma.sigma_loc / (1j * grid.k0)) * (-1j * grid.gamma_w[i]))
    assert d_p == pytest.approx(expected, rel=1e-12)
    assert abs(d_p) > 0.5 * cfg.tau_w * abs(grid.gamma_w[i])


def test_tm_cases_labels():
    grid = ribbon_grid("TM", f=10 * THZ, N_x=32, theta=0.1)
    cases = tm_sign_cases(grid)
    assert set(np.unique(cases)) <= {1, 2, 3, 4}
    assert cases[grid.zero_index] == 4
    assert cases[0] == 1


def test_resonance_detected():
    grid = ribbon_grid("TE")
    # a conductivity that cancels Delta_0 exactly
    g0 = grid.gamma_u[grid.zero_index] + grid.gamma_w[grid.zero_index]
    sigma = SigmaPair(-g0 / grid.k0)
    with pytest.raises(ResonanceError) as info:
        determinant_te(grid, sigma, 1.0)
    assert info.value.p == 0


@pytest.mark.parametrize("nonlocal_,pol,slope", [(True, "TE", 2.0), (True, "TM", 4.0)])
def test_tail_growth(graphene, nonlocal_, pol, slope):
    grid = ribbon_grid(pol, f=4 * THZ, N_x=2**20)
    sigma = sigma_pair(graphene.with_nonlocal(nonlocal_), 4 * THZ)
    d = delta_te(grid, sigma, 1.0) if pol == "TE" else delta_tm(grid, sigma, 1.0)
    p = grid.p
    tail = (p >= grid.N_x // 4)
    fit = np.polyfit(np.log(p[tail]), np.log(np.abs(d[tail])), 1)[0]
    assert fit == pytest.approx(slope, abs=0.1)


def _draw(rng, pol):
    """Random per-mode data with gamma on either branch."""
    ku, kw = rng.uniform(0.5, 3.0, 2)
    a = rng.uniform(-5, 5)
    gu = np.sqrt(complex(ku * ku - a * a))
    gw = np.sqrt(complex(kw * kw - a * a))
    gu = gu if gu.imag >= 0 else -gu
    gw = gw if gw.imag >= 0 else -gw
    sym = complex(rng.uniform(0, 3), rng.uniform(-3, 3))
    X0 = rng.uniform(0.2, 2.0)
    tu, tw = (1.0, 1.0) if pol == "TE" else tuple(1 / rng.uniform(1, 10, 2))
    q, r = rng.normal(size=2) + 1j * rng.normal(size=2)
    return gu, gw, sym, X0, tu, tw, q, r


@pytest.mark.parametrize("pol", ["TE", "TM"])
def test_closed_form_back_substitution_random(pol):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        gu, gw, sym, X0, tu, tw, q, r = _draw(rng, pol)
        g, j = -1j * gu, -1j * gw
        if pol == "TE":
            M = np.array([[1, -1], [g, j - sym * X0]])
            delta = -1j * gu - 1j * gw - sym * X0
            U = ((-1j * gw - sym * X0) * q + r) / delta
            W = (1j * gu * q + r) / delta
        else:
            M = np.array([[1, -1 + sym * X0 * tw * j], [tu * g, tw * j]])
            delta = -1j * tu * gu - 1j * tw * gw + tu * tw * sym * X0 * gu * gw
            U = (-tw * 1j * gw * q + (1 + sym * X0 * tw * 1j * gw) * r) / delta
            W = (tu * 1j * gu * q + r) / delta
        x = np.array([U, W])
        res = np.linalg.norm(M @ x - [q, r]) / (np.linalg.norm(M, 2) * np.linalg.norm(x) + np.linalg.norm([q, r]))
        worst = max(worst, res)
    assert worst < 1e-12


@settings(max_examples=50, deadline=None)
@given(eps_u=st.floats(1, 10), eps_w=st.floats(1, 10), theta=st.floats(-1.2, 1.2), f_THz=st.floats(0.5, 12),
       pol=st.sampled_from(["TE", "TM"]), nonlocal_=st.booleans())
def test_library_solve_matches_forward_operator(eps_u, eps_w, theta, f_THz, pol, nonlocal_):
    cfg = PhysicalConfig(eps_u, eps_w, 4 * UM, theta, f_THz * THZ, pol)
    grid = build_grid(cfg, 64)
    graphene = GrapheneParams.from_units(0.4, 3.7)
    op = Order0Operator.build(grid, sigma_pair(graphene.with_nonlocal(nonlocal_), cfg.f), 1.0)
    rng = np.random.default_rng(0)
    Q = rng.normal(size=64) + 1j * rng.normal(size=64)
    R = rng.normal(size=64) + 1j * rng.normal(size=64)
    U, W = op.solve(Q, R)
    assert residual(op, U, W, Q, R) < 1e-14
