import math
import warnings

import pytest
from scipy.integrate import IntegrationWarning

from rgbose.lab.errors import DomainError
from rgbose.lab.model import ModelParams
from rgbose.lab.thermo import (
    LHY_COEFFICIENT,
    chemical_potential,
    depletion,
    depletion_slope,
    dispersion,
    double_well,
    double_well_kinks,
    double_well_minimum,
    double_well_terms,
    finite_T_depletion,
    ground_state_energy,
    lhy_closed_form,
    lhy_integral,
    scattering_length,
    sound_speed,
)


@pytest.mark.parametrize("lam,rho0", [(0.05, 1.0), (0.1, 1.0)])
def test_lhy_integral_matches_closed_form(lam, rho0):
    params = ModelParams(lam=lam, rho0=rho0, d=3)
    value, _ = lhy_integral(params)
    assert value == pytest.approx(lhy_closed_form(params), rel=1e-4)


def test_ground_state_energy_3d_constant_potential():
    params = ModelParams(lam=0.05, rho0=1.0, d=3)
    result = ground_state_energy(params)
    a0 = scattering_length(params)
    assert result.terms["leading"] == pytest.approx(4.0 * math.pi * params.rho0 * a0)
    assert math.isnan(result.terms["I1"])
    assert result.value == pytest.approx(result.terms["leading"] + lhy_closed_form(params), rel=1e-6)


def test_lhy_coefficient():
    assert LHY_COEFFICIENT == pytest.approx(128.0 / (15.0 * math.sqrt(math.pi)))


def test_ground_state_energy_2d_needs_decaying_potential(params2d):
    with pytest.raises(DomainError):
        ground_state_energy(params2d, potential="constant")
    result = ground_state_energy(params2d)
    # The fluctuation correction lowers the energy
    assert result.terms["correction"] < 0
    assert result.value < result.terms["leading"]


def test_dispersion_is_phonon_like_at_small_k(params3d):
    k = 1e-5
    assert dispersion(k, params3d) / k == pytest.approx(sound_speed(params3d), rel=1e-6)
    assert dispersion(10.0, params3d) == pytest.approx(100.0, rel=1e-3)


def test_chemical_potential_leading_and_bad_order(params3d):
    assert chemical_potential(params3d) == pytest.approx(params3d.lam * params3d.rho0 * params3d.vhat0)
    with pytest.raises(DomainError):
        chemical_potential(params3d, order="second")
    with pytest.raises(DomainError):
        chemical_potential(params3d, order="corrected", potential="constant")


def test_depletion_d1_needs_ir_cutoff(params3d):
    with pytest.raises(DomainError):
        depletion(params3d, d=1)


def test_depletion_d1_grows_logarithmically(params3d):
    g = params3d.lam * params3d.rho0 * params3d.vhat0
    slope = depletion_slope(lambda c: depletion(params3d, d=1, ir_cutoff=c))
    assert slope == pytest.approx(math.sqrt(g / 2.0) / math.pi, rel=2e-2)


def test_depletion_3d_is_finite(params3d):
    assert depletion(params3d, ir_cutoff=1e-4) == pytest.approx(depletion(params3d), abs=1e-8)


def test_finite_temperature_depletion_2d_diverges(params2d):
    beta = 10.0
    slope = depletion_slope(lambda c: finite_T_depletion(params2d, beta, ir_cutoff=c))
    assert slope == pytest.approx(1.0 / (4.0 * math.pi * beta), rel=2e-2)


def test_finite_temperature_depletion_3d_converges(params3d):
    beta = 10.0
    at_zero = finite_T_depletion(params3d, beta)
    assert at_zero > 0
    assert finite_T_depletion(params3d, beta, ir_cutoff=1e-4) == pytest.approx(at_zero, abs=1e-6)


def test_finite_temperature_depletion_rejects_bad_input(params3d):
    with pytest.raises(DomainError):
        finite_T_depletion(params3d, beta=0.0)
    with pytest.raises(DomainError):
        finite_T_depletion(ModelParams(d=1), beta=1.0)


def test_double_well_polynomial_terms_vanish_at_origin(params3d):
    terms = double_well_terms(0.0, params3d)
    assert terms["linear"] == 0.0
    assert terms["quartic"] == 0.0
    with pytest.raises(DomainError):
        double_well(-1.0, params3d)


def test_double_well_minimum_near_condensate_density(params3d, caplog):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        result = double_well_minimum(params3d)
    assert "above tolerance" not in caplog.text
    assert 0.5 * params3d.rho0 < result["xi_sq_min"] < 1.5 * params3d.rho0
    assert result["W_min"] < double_well(0.0, params3d)


def test_double_well_kinks(params3d):
    mu = params3d.lam * params3d.vhat0 * params3d.rho0
    assert double_well_kinks(0.0, params3d, 10.0, mu, "exponential") == pytest.approx([math.sqrt(mu)])
    assert double_well_kinks(2.0 * params3d.rho0, params3d, 10.0, mu, "exponential") == []
    kinks = double_well_kinks(0.25 * params3d.rho0, params3d, 10.0, mu, "exponential")
    assert len(kinks) == 2
    assert kinks[1] == pytest.approx(math.sqrt(0.75 * mu))
