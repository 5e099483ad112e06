import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopegraphene.conductivity import (GrapheneParams, SigmaPair, bgk_q, drude, flat_envelope, ribbon_profile,
                                       sample_envelope, sigma_pair)

# Frozen from a 40-digit mpmath evaluation of the closed forms.
DRUDE_2THZ = 0.52615958704044141361 + 1.1762276797567302074j
Q_2THZ = 2.0845620868742326311e-15 - 2.2477839653498631927e-14j
PAIR_4THZ = (0.15034046878833063521 + 0.67217104898193363435j,
             7.7937386481326635624e-15 - 1.8758911969031331557e-16j)


def test_drude_frozen_value(graphene):
    assert drude(graphene, 2e12) == pytest.approx(DRUDE_2THZ, rel=1e-13)


def test_q_frozen_value(graphene):
    assert bgk_q(graphene, 2e12) == pytest.approx(Q_2THZ, rel=1e-13)


def test_q_rationalized_form(graphene):
    # Q = v^2 (3f + 2i/t) (f - i/t)^2 / (4 f (f^2 + 1/t^2)^2), expanded by hand
    f, v, g = 2e12, graphene.v_F, 1 / graphene.tau
    denom = 4 * f * (f * f + g * g) ** 2
    re = v * v * (3 * f**3 + f * g * g) / denom
    im = v * v * (-4 * f * f * g - 2 * g**3 + 2 * f * f * g) / denom
    assert bgk_q(graphene, f) == pytest.approx(complex(re, im), rel=1e-13)


def test_pair_frozen_value():
    g = GrapheneParams.from_units(0.4, 3.7, nonlocal_=True)
    pair = sigma_pair(g, 4e12)
    assert pair.sigma_loc == pytest.approx(PAIR_4THZ[0], rel=1e-13)
    assert pair.sigma_nloc == pytest.approx(PAIR_4THZ[1], rel=1e-13)


@pytest.mark.parametrize("f", np.geomspace(0.1e12, 20e12, 13))
def test_sign_properties(graphene, f):
    s = drude(graphene, f)
    q = bgk_q(graphene, f)
    assert s.real > 0 and s.imag > 0
    assert q.real > 0 and q.imag < 0


@given(E_F=st.floats(0.01, 2), Gamma=st.floats(0.01, 100), f=st.floats(1e10, 1e14),
       tau=st.floats(1e-15, 1e-11))
def test_sign_properties_random(E_F, Gamma, f, tau):
    g = GrapheneParams.from_units(E_F, Gamma, tau=tau)
    s = drude(g, f)
    assert s.real > 0 and s.imag > 0
    q = bgk_q(g, f)
    assert q.real > 0 and q.imag < 0


def test_large_damping_vanishes():
    values = [abs(drude(GrapheneParams.from_units(0.4, gm), 2e12)) for gm in (1e2, 1e4, 1e6)]
    assert values[0] > values[1] > values[2]
    # |sigma| ~ 1/Gamma once Gamma dominates h f
    assert values[2] == pytest.approx(values[1] / 100, rel=1e-3)
    assert values[2] < 1e-4


def test_q_high_frequency_limit(graphene):
    f = 1e18
    q = bgk_q(graphene, f)
    assert q.real == pytest.approx(3 * graphene.v_F**2 / (4 * f * f), rel=1e-5)
    assert abs(q.imag) < 1e-4 * q.real


def test_local_and_nonlocal_pairs(graphene):
    local = sigma_pair(graphene, 3e12)
    assert local.sigma_nloc == 0
    nl = sigma_pair(graphene.with_nonlocal(True), 3e12)
    assert nl.sigma_loc == local.sigma_loc
    assert nl.sigma_nloc / nl.sigma_loc == pytest.approx(bgk_q(graphene, 3e12), rel=1e-14)


def test_symbol(graphene):
    pair = sigma_pair(graphene.with_nonlocal(True), 2e12)
    alpha = np.array([0.0, 1e5, 1e6])
    sym = pair.symbol(alpha)
    np.testing.assert_allclose(sym / pair.sigma_loc, 1 + bgk_q(graphene, 2e12) * alpha**2, rtol=1e-14)
    assert SigmaPair.zero().is_zero


@pytest.mark.parametrize("bad", [{"E_F": 0}, {"Gamma": -1}, {"tau": 0}, {"v_F": float("inf")}])
def test_params_reject_nonpositive(bad):
    kw = dict(E_F=1e-19, Gamma=1e-21)
    kw.update(bad)
    with pytest.raises(ValueError):
        GrapheneParams(**kw)


@pytest.mark.parametrize("f", [0.0, -1e12, float("nan")])
def test_bad_frequency(graphene, f):
    with pytest.raises(ValueError):
        drude(graphene, f)


@pytest.mark.parametrize("N_x", [16, 64, 128])
def test_envelope_center_and_tails(N_x):
    d = 8e-6
    env = sample_envelope(d, 1.0, 0.5, N_x)
    x = env.x
    assert env.samples_X1[N_x // 2] == pytest.approx(0.0, abs=1e-15)
    far = np.abs(x - d / 2) >= d / 4
    np.testing.assert_array_equal(env.samples_X1[far], -1.0)
    total = env.total(1.0)
    np.testing.assert_allclose(total, ribbon_profile(x, d, d / 2), atol=1e-15)
    np.testing.assert_array_equal(total[far], 0.0)


def test_envelope_symmetry():
    env = sample_envelope(1.0, 2.0, 0.7, 64)
    x1 = env.samples_X1
    # x_j and d - x_j mirror about d/2
    np.testing.assert_allclose(x1[1:], x1[1:][::-1], atol=1e-15)


def test_envelope_at_zero_delta_is_constant():
    env = sample_envelope(1.0, 1.5, 0.5, 32)
    np.testing.assert_array_equal(env.total(0.0), 1.5)


@pytest.mark.parametrize("kwargs", [dict(X0=0.0), dict(width_fraction=0.0), dict(width_fraction=1.5),
                                    dict(N_x=100)])
def test_envelope_rejects(kwargs):
    args = dict(d=1.0, X0=1.0, width_fraction=0.5, N_x=64)
    args.update(kwargs)
    with pytest.raises(ValueError):
        sample_envelope(**args)


def test_flat_envelope():
    env = flat_envelope(1.0, 1.0, 16)
    assert not env.samples_X1.any()
    fine = env.resampled(32)
    assert fine.n == 32 and not fine.samples_X1.any()
