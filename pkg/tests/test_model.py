import math

import numpy as np
import pytest

from rgbose.lab.errors import DomainError
from rgbose.lab.model import (
    CutoffProfile,
    ModelParams,
    Momentum,
    chi0,
    chi0_complement,
    epsilon,
    f_h,
    floor_hbar_scale,
    hbar_scale,
    shell_indicator,
    smooth_step,
    vhat,
    window_chi,
)


def test_cutoff_thresholds():
    profile = CutoffProfile("smooth", 2.0)
    assert profile.a == pytest.approx(0.4)
    assert profile.b == pytest.approx(1.6)
    assert profile.a + profile.b == pytest.approx(2.0)


@pytest.mark.parametrize("kind,gamma", [("foo", 2.0), ("smooth", 1.0), ("sharp", 0.5)])
def test_cutoff_profile_rejects_bad_input(kind, gamma):
    with pytest.raises(DomainError):
        CutoffProfile(kind, gamma)


def test_smooth_step_limits():
    assert smooth_step(-0.5) == 0.0
    assert smooth_step(1.5) == 1.0
    assert smooth_step(0.5) == pytest.approx(0.5)
    values = smooth_step(np.linspace(0.0, 1.0, 101))
    assert np.all(np.diff(values) >= 0.0)


def test_chi0_plateaus():
    profile = CutoffProfile("smooth", 2.0)
    assert chi0(0.1, profile) == 1.0
    assert chi0(profile.a, profile) == 1.0
    assert chi0(profile.b, profile) == 0.0
    assert chi0(3.0, profile) == 0.0
    t = np.linspace(0.3, 1.7, 57)
    np.testing.assert_allclose(chi0(t, profile) + chi0_complement(t, profile), 1.0, atol=1e-14)


@pytest.mark.parametrize("kind", ["sharp", "smooth"])
def test_single_scale_cutoffs_telescope(kind):
    profile = CutoffProfile(kind, 2.0)
    ksq = np.array([1e-6, 0.003, 0.2, 0.77])
    total = sum(f_h(ksq, h, profile) for h in range(-40, 1))
    np.testing.assert_allclose(total, chi0(ksq, profile), atol=1e-12)
    np.testing.assert_allclose(window_chi(ksq, -40, profile), total, atol=1e-12)


def test_single_scale_cutoff_support():
    profile = CutoffProfile("smooth", 2.0)
    h = -3
    inside = profile.a * profile.gamma ** (2 * h)
    assert f_h(inside, h, profile) == pytest.approx(1.0)
    assert f_h(profile.b * profile.gamma ** (2 * h) * 1.01, h, profile) == 0.0
    assert f_h(profile.a * profile.gamma ** (2 * h - 2) * 0.99, h, profile) == 0.0


def test_shell_indicator():
    gamma = 2.0
    a, b = 2.0 / (gamma ** 2 + 1.0), 2.0 * gamma ** 2 / (gamma ** 2 + 1.0)
    assert shell_indicator(b, gamma) == 1.0
    assert shell_indicator(a / gamma ** 2, gamma) == 1.0
    assert shell_indicator(b * 1.001, gamma) == 0.0


def test_epsilon_and_hbar():
    params = ModelParams(lam=0.1, rho0=1.0, R0=1.0, vhat0=1.0, d=3, gamma=2.0)
    assert epsilon(params) == pytest.approx(0.2)
    assert params.epsilon == pytest.approx(0.2)
    assert hbar_scale(params) == pytest.approx(math.log(0.2) / math.log(2.0))
    assert floor_hbar_scale(params) == -3


def test_hbar_requires_small_epsilon():
    params = ModelParams(lam=1.0, rho0=1.0, R0=1.0, vhat0=1.0)
    with pytest.raises(DomainError):
        hbar_scale(params)


def test_model_params_validation():
    with pytest.raises(DomainError):
        ModelParams(lam=-0.1)
    with pytest.raises(DomainError):
        ModelParams(d=4)
    with pytest.raises(DomainError):
        ModelParams(rho0=0.0)


def test_model_params_document_roundtrip():
    params = ModelParams(lam=0.07, d=2, gamma=1.5, cutoff="sharp")
    document = params.to_dict()
    assert document["lambda"] == 0.07
    assert document["cutoff"] == {"kind": "sharp"}
    assert ModelParams.from_dict(document) == params
    assert params.with_updates(lam=0.2).lam == 0.2


def test_vhat_profiles():
    params = ModelParams(d=3, vhat0=2.0, R0=1.0)
    assert vhat(5.0, params) == 2.0
    assert vhat(0.0, params, "exponential") == 2.0
    assert vhat(1.0, params, "exponential") == pytest.approx(2.0 / 4.0)
    with pytest.raises(DomainError):
        vhat(1.0, params, "yukawa")


def test_momentum():
    assert Momentum(0.0, 0.0).is_zero
    assert not Momentum(0.1).is_zero
    assert Momentum(0.0, 3.0).ksq == 9.0
