import math

import numpy as np
import pytest

from rgbose.lab.errors import DomainError
from rgbose.lab.model import ModelParams, Momentum, kappa
from rgbose.lab.propagators import (
    BOUND_STABILITY,
    MAX_WINDOW_RADIUS,
    WaveFunctionRenorms,
    above_bound_weight,
    below_bound_prefactor,
    bogoliubov_denominator,
    bogoliubov_lt,
    bogoliubov_pm,
    pm_from_lt,
    propagator_bound_rows,
    regime_of,
    renormalized_g,
    scaled_grid,
    scaling_collapse,
    single_scale_g,
    verify_decay_bound,
)


@pytest.fixture
def params():
    return ModelParams(lam=0.1, rho0=1.0, R0=1.0, vhat0=1.0, d=3, gamma=2.0)


def test_pm_propagator_inverts_quadratic_form(params):
    k = Momentum(0.3, 0.7)
    g = params.lam * params.rho0 * params.vhat0
    form = np.array([[-1j * k.k0 + k.ksq + g, g], [g, 1j * k.k0 + k.ksq + g]])
    np.testing.assert_allclose(bogoliubov_pm(k, params) @ form, np.eye(2), atol=1e-12)


def test_lt_and_pm_bases_agree(params):
    k = Momentum(0.4, 0.5)
    np.testing.assert_allclose(pm_from_lt(bogoliubov_lt(k, params), params.rho0), bogoliubov_pm(k, params),
                               atol=1e-12)


def test_lt_propagator_determinant(params):
    k = Momentum(0.2, 0.9)
    g_lt = bogoliubov_lt(k, params) * params.rho0
    assert np.linalg.det(g_lt).real == pytest.approx(1.0 / bogoliubov_denominator(k, params), rel=1e-12)


def test_propagators_singular_at_zero(params):
    with pytest.raises(DomainError):
        bogoliubov_pm(Momentum(0.0, 0.0), params)
    with pytest.raises(DomainError):
        bogoliubov_lt(Momentum(0.0, 0.0), params)


def test_renormalized_propagator_reduces_at_crossover(params):
    k = Momentum(0.3, 0.2)
    g = renormalized_g(k, WaveFunctionRenorms(Z=params.epsilon, A=1.0, B=0.0, E=1.0), params)
    assert g.shape == (2, 2)
    assert g[0, 1] == pytest.approx(-g[1, 0])
    assert np.all(np.isfinite(g))


def test_bound_weights():
    assert above_bound_weight(0.0, 0.0, -3, 2, 2.0) == 1.0
    assert above_bound_weight(8.0, 0.0, -3, 1, 2.0) == pytest.approx(2.0)


def test_below_prefactor_counts_longitudinal_legs(params):
    kap = kappa(params)
    h = -5
    tt = below_bound_prefactor(h, "tt", kap, 3, 2.0)
    lt = below_bound_prefactor(h, "lt", kap, 3, 2.0)
    ll = below_bound_prefactor(h, "ll", kap, 3, 2.0)
    assert lt / tt == pytest.approx(2.0 ** h / kap)
    assert ll / lt == pytest.approx(2.0 ** h / kap)


def test_regime_of(params):
    assert regime_of(-2, params) == "above"
    assert regime_of(-3, params) == "below"


def test_single_scale_entries_are_real_or_imaginary(params):
    diagonal = single_scale_g(0.5, 0.5, -4, "tt", params)
    off = single_scale_g(0.5, 0.5, -4, "lt", params)
    assert diagonal.imag == 0.0
    assert off.real == 0.0
    with pytest.raises(DomainError):
        single_scale_g(0.0, 0.0, 1, "tt", params)


def test_scaling_collapse_above_crossover():
    params = ModelParams(lam=5e-5, d=3, gamma=2.0)
    grid = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]
    values = scaling_collapse(range(-2, -7, -1), grid, params)
    reference = np.array(values[-2])
    for h, row in values.items():
        assert np.max(np.abs(np.array(row) - reference)) <= 0.05 * np.max(np.abs(reference))


def test_decay_bound_rejects_mixed_regimes(params):
    with pytest.raises(DomainError):
        verify_decay_bound([-2, -4], 1, scaled_grid(1.0), params)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_decay_constant_stable_under_window_doubling(params, N):
    rows = propagator_bound_rows(params, [-3, -4, -5], [N], radius=2.0)
    assert len(rows) == 3
    for row in rows:
        assert row["N"] == N
        assert row["fitted_C"] > 0
        assert row["max_violation"] <= BOUND_STABILITY
        assert 2.0 <= row["window"] <= MAX_WINDOW_RADIUS


@pytest.mark.parametrize("N", [1, 3])
def test_decay_constant_stable_above_crossover(N):
    params = ModelParams(lam=5e-5, d=3, gamma=2.0)
    rows = propagator_bound_rows(params, [-3, -4], [N], radius=2.0)
    assert all(row["max_violation"] <= BOUND_STABILITY for row in rows)


def test_bound_rows_reject_bad_windows(params):
    with pytest.raises(DomainError):
        propagator_bound_rows(params, [-4], [1], radius=0.0)
    with pytest.raises(DomainError):
        propagator_bound_rows(params, [-4], [1], radius=64.0)
    with pytest.raises(DomainError):
        propagator_bound_rows(params, [-2, -4], [1])
