import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from rgbose.lab.errors import DomainError
from rgbose.lab.model import CutoffProfile, ModelParams, Momentum
from rgbose.lab.quadrature import (
    QuadratureSpec,
    angular_cancellation,
    beta2_3d,
    beta2_3d_closed_form,
    beta_tilde_2d,
    beta_tilde_closed_form,
    correction_mu_tilde,
    delta_support,
    last_scale_demo,
    mu_tilde_closed_form,
    mu_tilde_printed_3d,
    wi_A_oneloop,
)


@pytest.mark.parametrize("gamma", [1.1, 2.0, 4.0])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_beta_tilde_quadrature_matches_closed_form(n, gamma):
    numeric = beta_tilde_2d(n, gamma, "sharp", QuadratureSpec(1e-11, 1e-15))
    assert numeric == pytest.approx(beta_tilde_closed_form(n, gamma), rel=1e-6)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_beta_tilde_limit(n):
    assert beta_tilde_closed_form(n, 1.0001) == pytest.approx(1.0 / math.pi ** 2, rel=1e-3)


def test_beta_tilde_rejects_bad_index():
    with pytest.raises(DomainError):
        beta_tilde_closed_form(4, 2.0)


@pytest.mark.parametrize("gamma", [1.5, 2.0, 4.0])
def test_beta2_3d(gamma):
    expected = math.log(gamma) / (8.0 * math.pi ** 2)
    assert beta2_3d_closed_form(gamma) == pytest.approx(expected)
    assert beta2_3d(gamma, "sharp", QuadratureSpec(1e-11, 1e-15)) == pytest.approx(expected, rel=1e-6)


def test_mu_tilde_2d_value():
    assert mu_tilde_closed_form(2, 2.0) == pytest.approx(0.0119366, rel=1e-5)
    assert correction_mu_tilde(2, 2.0) == pytest.approx(mu_tilde_closed_form(2, 2.0), rel=1e-5)


def test_mu_tilde_3d_quadrature():
    assert correction_mu_tilde(3, 2.0) == pytest.approx(mu_tilde_closed_form(3, 2.0), rel=1e-4)


@pytest.mark.parametrize("gamma", [1.2, 2.0, 3.0])
def test_mu_tilde_positive(gamma):
    assert mu_tilde_closed_form(2, gamma) > 0
    assert mu_tilde_closed_form(3, gamma) > 0


def test_mu_tilde_vanishes_at_gamma_one():
    assert mu_tilde_closed_form(2, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert mu_tilde_closed_form(3, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert mu_tilde_printed_3d(1.0) != pytest.approx(0.0, abs=1e-6)


def test_gamma_reflection():
    assert gamma_fn(-0.25) == pytest.approx(-4.0 * gamma_fn(0.75), rel=1e-14)


def test_angular_cancellation():
    assert angular_cancellation(CutoffProfile("sharp", 2.0)) == pytest.approx(0.0, abs=1e-8)


def test_correction_function_vanishes_inside_window():
    profile = CutoffProfile("smooth", 2.0)
    report = delta_support(-2, -3, -6, profile)
    assert report["interior"] == 1.0
    assert report["vanishes"] == 1.0


def test_correction_function_survives_at_window_edge():
    profile = CutoffProfile("smooth", 2.0)
    report = delta_support(0, 0, -6, profile)
    assert report["interior"] == 0.0
    assert report["max_abs"] > 0.0


def test_last_scale_singularity():
    params = ModelParams(lam=0.05, d=3, gamma=2.0)
    report = last_scale_demo(-4, params)
    assert report["edge_exponent"] == pytest.approx(-0.5, abs=0.1)
    assert report["bound_check"]
    assert np.all(np.diff(report["sweep_values"]) >= 0.0)


@pytest.mark.parametrize("p", [Momentum(0.0, 0.2), Momentum(0.3, 0.1), Momentum(0.1, 0.4)])
def test_local_wi_for_A_one_loop(p):
    params = ModelParams(lam=0.05, d=3, gamma=2.0)
    result = wi_A_oneloop(p, 0, params)
    scale = max(abs(result["lhs"]), abs(result["rhs0"] - result["rhs1"]))
    assert abs(result["residual"]) <= 1e-6 * scale
