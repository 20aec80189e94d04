import math
from dataclasses import replace
from fractions import Fraction

import pytest

from rgbose.lab.errors import DomainError
from rgbose.lab.flows import beta_table, source_couplings, trajectory_2d, trajectory_3d
from rgbose.lab.model import ModelParams, Momentum
from rgbose.lab.ward import (
    EXACT,
    LEADING_ORDER,
    QUADRATURE,
    WIReport,
    diagrams_2d,
    local_WI_check,
    oneloop_beta_3d,
    oneloop_global_2d,
    oneloop_global_3d,
    run_ward_suite,
    tree_level_global,
    wi_A_quadrature,
)

BETA2 = math.log(2.0) / (8.0 * math.pi ** 2)


def test_report_residual_and_pass():
    report = WIReport("x = y", 1.0, 1.0 + 1e-14, EXACT)
    assert report.residual == pytest.approx(-1e-14)
    assert report.passed
    assert not WIReport("x = y", 1.0, 1.1, EXACT).passed
    data = report.to_dict()
    assert data["passed"] is True
    assert data["classification"] == EXACT
    with pytest.raises(DomainError):
        WIReport("x = y", 1.0, 1.0, "approximate")


@pytest.mark.parametrize("d", [2, 3])
def test_tree_level_identities(d):
    reports = tree_level_global(ModelParams(lam=0.05, d=d))
    assert len(reports) == 8
    assert all(r.passed and r.classification == EXACT for r in reports)
    assert reports[0].details["exact_residual"] == "0"


def test_oneloop_beta_3d_parts_sum():
    params = ModelParams(lam=0.05, d=3)
    parts = oneloop_beta_3d(0.01, 4.0 * math.sqrt(2.0) * 0.01, params, BETA2)
    assert parts["lambda"] == pytest.approx(parts["lambda_2nd"] + parts["lambda_3rd"] + parts["lambda_4th"])
    assert parts["mu"] == pytest.approx(parts["mu_2nd"] + parts["mu_3rd"])
    c = params.lam * (2.0 * params.lam) ** -0.5 * BETA2
    assert parts["lambda"] == pytest.approx(-4.0 * c * 0.01 ** 2)


@pytest.mark.parametrize("h", [-5, -20])
def test_oneloop_global_3d(params3d, h):
    reports = oneloop_global_3d(params3d, h, beta2_value=BETA2)
    assert len(reports) == 5
    for report in reports:
        assert report.passed, report.name


def test_oneloop_global_3d_with_running_Z(params3d):
    # The identity route holds with the WI value of Z_h only
    reports = oneloop_global_3d(params3d, -5, beta2_value=BETA2, lam_h=0.004, Z_h=0.1)
    identity = reports[-1]
    assert not identity.passed
    assert all(r.passed for r in reports[:-1])


def test_oneloop_global_3d_needs_d3(params2d):
    with pytest.raises(DomainError):
        oneloop_global_3d(params2d, -5)


def test_diagram_prefactors_match_printed_values(params2d):
    sets = diagrams_2d(params2d, -8, beta_table(2.0, limit=True), 0.25, 0.01)
    expected = {"z1": 1, "z2": -1, "z3": -9, "m1": 1, "m2": 27, "m3": -2}
    for diagram in sets["Z"] + sets["mu_prime"]:
        assert diagram.prefactor == Fraction(expected[diagram.name])
    plain = {d.name: d.plain_propagators for d in sets["Z"] + sets["mu_prime"]}
    assert plain == {"z1": 2, "z2": 2, "z3": 0, "m1": 3, "m2": 0, "m3": 2}


@pytest.mark.parametrize("h,lam_h,lam6_h", [(-8, 0.25, 0.01), (-15, 0.1, 0.003), (-30, 0.5, 0.2)])
def test_oneloop_global_2d(params2d, h, lam_h, lam6_h):
    reports = oneloop_global_2d(params2d, h, beta_table(2.0, limit=True), lam_h, lam6_h)
    assert len(reports) == 6 + 2 + 6
    for report in reports:
        assert report.passed, report.name


def test_oneloop_global_2d_rejects_bad_input(params2d, params3d):
    betas = beta_table(2.0, limit=True)
    with pytest.raises(DomainError):
        oneloop_global_2d(params3d, -8, betas)
    with pytest.raises(DomainError):
        oneloop_global_2d(params2d, -8, betas, lam_h=0.0)


def test_local_wis_hold_on_propagator_variant(params3d):
    traj, _ = trajectory_3d(params3d, steps=30, beta2=BETA2)
    reports = local_WI_check(traj, params3d)
    assert len(reports) == 6
    assert all(r.classification == LEADING_ORDER for r in reports)
    assert all(r.passed for r in reports)


def test_complete_B_variant_breaks_propagator_identities(params3d):
    # A large beta2 drives E well below one within a few scales
    traj, _ = trajectory_3d(params3d, steps=30, beta2=100.0, variant="Bh_complete")
    reports = {r.name: r for r in local_WI_check(traj, params3d)}
    assert not reports["E^2 + Z B = Z/eps"].passed
    # the source flows carry the propagator normalisation of B
    assert not reports["E^J0 = -sqrt2 B"].passed
    assert not reports["J = B"].passed
    assert reports["2 gamma^((3-d)h/2) mu^J0 = E"].passed
    traj, _ = trajectory_3d(params3d, steps=30, beta2=100.0, variant="propWI")
    assert all(r.passed for r in local_WI_check(traj, params3d))


def test_source_couplings_follow_the_mu_flow(params3d):
    traj, _ = trajectory_3d(params3d, steps=30, beta2=BETA2)
    count = len(traj)
    skewed = [replace(s, mu=s.mu * (1.0 + 0.5 * i / count)) for i, s in enumerate(traj.states)]
    traj = source_couplings(traj.with_states(skewed), 3)
    reports = {r.name: r for r in local_WI_check(traj, params3d)}
    assert not reports["2 gamma^((3-d)h/2) mu^J0 = E"].passed
    assert reports["2 gamma^((3-d)h/2) mu^J0 = E"].details["states"] == count
    assert reports["E^J0 = -sqrt2 B"].passed


def test_local_wis_hold_along_2d_trajectory(params2d):
    traj = trajectory_2d(params2d, steps=20, betas=beta_table(params2d.gamma, limit=True))
    reports = local_WI_check(traj, params2d)
    assert all(r.passed for r in reports)
    assert max(abs(r.residual) / (r.scale or 1.0) for r in reports) < 1e-9


def test_local_wi_check_needs_source_couplings(params3d):
    from rgbose.lab.flows import flow3d_Z
    with pytest.raises(DomainError):
        local_WI_check(flow3d_Z(params3d, steps=3, beta2=BETA2), params3d)


def test_wi_A_quadrature():
    params = ModelParams(lam=0.05, d=3, gamma=2.0)
    report = wi_A_quadrature(Momentum(0.3, 0.1), 0, params)
    assert report.classification == QUADRATURE
    assert report.passed
    with pytest.raises(DomainError):
        wi_A_quadrature(Momentum(0.3, 0.1), 0, params.with_updates(d=2))


def test_run_ward_suite(params3d, params2d):
    traj, _ = trajectory_3d(params3d, steps=10, beta2=BETA2)
    reports = run_ward_suite(params3d, traj=traj)
    assert len(reports) == 8 + 5 + 6
    with pytest.raises(DomainError):
        run_ward_suite(params2d)
    reports = run_ward_suite(params2d, betas=beta_table(2.0, limit=True))
    assert all(r.passed for r in reports)
