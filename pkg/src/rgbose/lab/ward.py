"""
Ward-identity checks on the running couplings.

Global WIs are verified on the bare couplings in exact arithmetic and on the
one-loop beta functions built from hard-coded diagram values; local WIs are
checked on WI-constrained trajectories and, in 3d, by a one-loop quadrature.
"""

import math
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import DomainError
from .flows import FlowTrajectory, SQRT2
from .model import ModelParams, Momentum, epsilon
from .powercount import BELOW, DiagramExternals, Regime, classify
from .quadrature import QuadratureSpec, beta2_3d, wi_A_oneloop

logger = logging.getLogger(__name__)

EXACT = "exact"
LEADING_ORDER = "leading-order"
QUADRATURE = "quadrature"
CLASSIFICATIONS = (EXACT, LEADING_ORDER, QUADRATURE)

EXACT_TOL = 1e-12
# Frozen constant C of the leading-order band |residual|/scale <= C·λ.
LEADING_ORDER_BAND = 1.0

# Kernels (n_l, n_t) whose bare value vanishes by parity.
TREE_LEVEL_VANISHING = ((0, 1), (1, 1), (0, 3), (2, 1), (1, 3), (3, 1))


@dataclass
class WIReport:
    """One identity lhs = rhs with residual = lhs - rhs."""
    name: str
    lhs: float
    rhs: float
    classification: str
    tolerance: float = EXACT_TOL
    scale: float = 1.0
    details: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.classification not in CLASSIFICATIONS:
            raise DomainError(f"Unknown classification '{self.classification}'")

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.tolerance * self.scale

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data["residual"] = self.residual
        data["passed"] = self.passed
        return data


@dataclass(frozen=True)
class DiagramValue:
    """A hard-coded one-loop diagram with its combinatorial bookkeeping."""
    name: str
    expectation_coefficient: Fraction
    multiplicity: int
    printed_prefactor: Fraction
    plain_propagators: int
    value: float

    @property
    def prefactor(self) -> Fraction:
        return self.expectation_coefficient * self.multiplicity


def _truncated_coefficient(n: int) -> Fraction:
    """(-1)^{n+1}/n! for the truncated expectation of n vertices."""
    return Fraction((-1) ** (n + 1), math.factorial(n))


# --- tree level ----------------------------------------------------------------

def tree_level_global(params: ModelParams) -> List[WIReport]:
    """
    Bare-coupling identities 4√2λ̄₀ = μ̄₀ and 2√2μ̄₀ = Z̄₀ with λ̄₀ = ε/16,
    μ̄₀ = (√2/4)ε, Z̄₀ = ε, plus the parity zeros of the bare kernels.

    Quantities a + b√2 are carried as pairs of Fractions, so the residuals
    are exactly zero.
    """
    eps = Fraction(epsilon(params))
    lam0 = eps / 16            # rational
    mu0_sqrt2 = eps / 4        # μ̄₀ = √2·(ε/4)
    Z0 = eps

    # 4√2·λ̄₀ = √2·(4λ̄₀)
    lhs_mu = 4 * lam0
    residual_mu = lhs_mu - mu0_sqrt2
    # 2√2·μ̄₀ = 2·2·(ε/4)
    lhs_Z = 4 * mu0_sqrt2
    residual_Z = lhs_Z - Z0

    reports = [
        WIReport("bare 4*sqrt2*lambda = mu", float(lhs_mu) * SQRT2, float(mu0_sqrt2) * SQRT2, EXACT,
                 tolerance=0.0, details={"exact_residual": str(residual_mu)}),
        WIReport("bare 2*sqrt2*mu = Z", float(lhs_Z), float(Z0), EXACT,
                 tolerance=0.0, details={"exact_residual": str(residual_Z)}),
    ]
    regime = Regime(params.d, BELOW)
    for legs in TREE_LEVEL_VANISHING:
        vanishes = classify(DiagramExternals(*legs), regime)["vanishes_by_parity"]
        reports.append(WIReport(f"W_{legs[0]}{legs[1]} vanishes by parity", float(vanishes), 1.0, EXACT,
                                tolerance=0.0, details={"legs": list(legs)}))
    return reports


# --- one loop, three dimensions ----------------------------------------------------

def oneloop_beta_3d(lam_h: float, mu_h: float, params: ModelParams, beta2: float) -> Dict[str, float]:
    """
    One-loop beta functions of Z_h, μ_h and λ_h below h̄, split by the number
    of vertices in the contributing diagrams.
    """
    c = params.lam * epsilon(params) ** -0.5 * beta2
    parts = {
        "Z": -2.0 * c * mu_h ** 2,
        "mu_2nd": -12.0 * c * lam_h * mu_h,
        "mu_3rd": SQRT2 * c * mu_h ** 2,
        "lambda_2nd": -36.0 * c * lam_h ** 2,
        "lambda_3rd": 48.0 * c * lam_h ** 2,
        "lambda_4th": -16.0 * c * lam_h ** 2,
    }
    parts["mu"] = parts["mu_2nd"] + parts["mu_3rd"]
    parts["lambda"] = parts["lambda_2nd"] + parts["lambda_3rd"] + parts["lambda_4th"]
    return parts


def oneloop_global_3d(params: ModelParams, h: int, beta2_value: Optional[float] = None,
                      lam_h: Optional[float] = None, Z_h: Optional[float] = None) -> List[WIReport]:
    """
    One-loop global WIs β^Z = 16β^λ and 2√2β^μ = β^Z with μ_h = 4√2λ_h imposed.

    The third-order μ diagrams are also recomputed through the propagator
    identity 2√2μ[g_tt g_ll + g_tl²] = g_tt, which turns their sum into
    4λε⁻¹μ³·ε^{1/2}β₂/Z_h.
    """
    if params.d != 3:
        raise DomainError(f"oneloop_global_3d needs d=3, got d={params.d}")
    eps = epsilon(params)
    beta2 = beta2_3d(params.gamma, params.cutoff) if beta2_value is None else beta2_value
    lam_h = eps / 16.0 if lam_h is None else lam_h
    mu_h = 4.0 * SQRT2 * lam_h
    Z_h = 2.0 * SQRT2 * mu_h if Z_h is None else Z_h
    b = oneloop_beta_3d(lam_h, mu_h, params, beta2)
    scale = abs(b["Z"]) or 1.0

    c = params.lam * eps ** -0.5 * beta2
    identity_route = 4.0 * params.lam / eps * mu_h ** 3 * math.sqrt(eps) * beta2 / Z_h
    details = {"h": h, "beta2": beta2, "lambda_h": lam_h, "mu_h": mu_h}
    return [
        WIReport("beta^Z = 16 beta^lambda", b["Z"], 16.0 * b["lambda"], EXACT, scale=scale, details=details),
        WIReport("2*sqrt2*beta^mu = beta^Z", 2.0 * SQRT2 * b["mu"], b["Z"], EXACT, scale=scale, details=details),
        WIReport("beta^mu = -4 c lambda mu", b["mu"], -4.0 * c * lam_h * mu_h, EXACT, scale=scale, details=details),
        WIReport("beta^lambda = -4 c lambda^2", b["lambda"], -4.0 * c * lam_h ** 2, EXACT, scale=scale,
                 details=details),
        WIReport("third-order mu diagrams via propagator identity", identity_route, b["mu_3rd"], EXACT,
                 scale=abs(b["mu_3rd"]) or 1.0, details={**details, "Z_h": Z_h}),
    ]


# --- one loop, two dimensions -----------------------------------------------------

def diagrams_2d(params: ModelParams, h: int, betas: Mapping[int, float], lam_h: float,
                lam6_h: float) -> Dict[str, List[DiagramValue]]:
    """
    One-loop diagrams of β^{Z/2} (z1..z3) and β^{μ′} (m1..m3) in the
    asymptotic region, with λ′, μ, μ′ and Z substituted from the global WIs.

    betas are the normalised β̃ₙ; the diagrams use βₙ = (1-γ⁻¹)β̃ₙ.
    """
    gamma = params.gamma
    eps = epsilon(params)
    lam = params.lam
    beta = {n: (1.0 - 1.0 / gamma) * betas[n] for n in range(4)}
    g = gamma ** h
    mu = 4.0 * SQRT2 * math.sqrt(g) * lam_h
    Z = 16.0 * g * lam_h
    lam_p = 24.0 * g * lam6_h
    mu_p = 16.0 * SQRT2 * g ** 1.5 * lam6_h

    def diagram(name, n_vertices, multiplicity, printed, plain, value):
        coefficient = _truncated_coefficient(n_vertices)
        return DiagramValue(name, coefficient, multiplicity, Fraction(printed), plain,
                            float(coefficient * multiplicity) * value)

    z_set = [
        diagram("z1", 1, 1, 1, 2, lam / eps * beta[1] * lam_p),
        diagram("z2", 2, 2, -1, 2, lam * beta[2] * mu ** 2),
        diagram("z3", 2, 2 * 3 ** 2, -9, 0, lam / eps ** 2 * beta[0] * (mu_p / Z) ** 2),
    ]
    m_set = [
        diagram("m1", 3, 6, 1, 3, lam * eps * beta[3] * mu ** 3),
        diagram("m2", 3, 3 ** 3 * 6, 27, 0, lam / eps ** 2 * beta[0] * (mu_p / Z) ** 3),
        diagram("m3", 2, 2 * 2, -2, 2, lam * beta[2] * lam_p * mu),
    ]
    return {"Z": z_set, "mu_prime": m_set}


def lambda_bracket_terms(params: ModelParams, betas: Mapping[int, float], lam_h: float,
                         lam6_h: float) -> Dict[str, float]:
    """Terms of γ⁻¹λ_{h-1} - λ_h = -λ(1-γ⁻¹)[4β̃₂λ_h² - 3β̃₁ε⁻¹λ₆ + (9/4)β̃₀(λ₆/(ελ_h))²]."""
    eps = epsilon(params)
    pref = -params.lam * (1.0 - 1.0 / params.gamma)
    return {
        "z1": pref * (-3.0 * betas[1] * lam6_h / eps),
        "z2": pref * 4.0 * betas[2] * lam_h ** 2,
        "z3": pref * 2.25 * betas[0] * (lam6_h / (eps * lam_h)) ** 2,
    }


def lambda6_bracket_terms(params: ModelParams, betas: Mapping[int, float], lam_h: float,
                          lam6_h: float) -> Dict[str, float]:
    """Terms of λ₆,h-1 - λ₆,h = 8β₃λελ_h³ - 12β₂λλ_hλ₆ + (27/8)β₀λε(λ₆/(ελ_h))³."""
    eps = epsilon(params)
    lam = params.lam
    beta = {n: (1.0 - 1.0 / params.gamma) * betas[n] for n in range(4)}
    return {
        "m1": 8.0 * beta[3] * lam * eps * lam_h ** 3,
        "m2": 3.375 * beta[0] * lam * eps * (lam6_h / (eps * lam_h)) ** 3,
        "m3": -12.0 * beta[2] * lam * lam_h * lam6_h,
    }


def oneloop_global_2d(params: ModelParams, h: int, betas: Mapping[int, float],
                      lam_h: float = 0.25, lam6_h: float = 0.01) -> List[WIReport]:
    """
    One-loop global WIs in 2d.

    β^Z is twice the sum of z1..z3 and β^Z/(16γ^h) must rebuild the λ flow;
    γ^{-3h/2}β^{μ′}/(16√2) must rebuild the λ₆ flow. Each diagram is also
    compared with its own bracket term, which checks the identity separately
    among diagrams with the same number of plain propagators. The audit
    reports compare expectation coefficient times multiplicity with the
    printed prefactor.
    """
    if params.d != 2:
        raise DomainError(f"oneloop_global_2d needs d=2, got d={params.d}")
    if not lam_h > 0:
        raise DomainError(f"lambda_h must be positive, got {lam_h}")
    g = params.gamma ** h
    sets = diagrams_2d(params, h, betas, lam_h, lam6_h)
    lam_terms = lambda_bracket_terms(params, betas, lam_h, lam6_h)
    lam6_terms = lambda6_bracket_terms(params, betas, lam_h, lam6_h)

    reports = []
    for diagram in sets["Z"] + sets["mu_prime"]:
        reports.append(WIReport(f"{diagram.name} prefactor audit", float(diagram.prefactor),
                                float(diagram.printed_prefactor), EXACT, tolerance=0.0,
                                details={"expectation_coefficient": str(diagram.expectation_coefficient),
                                         "multiplicity": diagram.multiplicity}))

    beta_Z = 2.0 * sum(d.value for d in sets["Z"])
    beta_mu_p = sum(d.value for d in sets["mu_prime"])
    lam_total = sum(lam_terms.values())
    lam6_total = sum(lam6_terms.values())
    lam_scale = max(abs(v) for v in lam_terms.values()) or 1.0
    lam6_scale = max(abs(v) for v in lam6_terms.values()) or 1.0

    details = {"h": h, "lambda_h": lam_h, "lambda6_h": lam6_h}
    reports.append(WIReport("beta^Z/(16 gamma^h) = lambda flow", beta_Z / (16.0 * g), lam_total, EXACT,
                            scale=lam_scale, details=details))
    reports.append(WIReport("gamma^(-3h/2) beta^mu'/(16 sqrt2) = lambda6 flow",
                            beta_mu_p / (16.0 * SQRT2 * g ** 1.5), lam6_total, EXACT,
                            scale=lam6_scale, details=details))
    for diagram in sets["Z"]:
        reports.append(WIReport(f"{diagram.name} term of the lambda flow", 2.0 * diagram.value / (16.0 * g),
                                lam_terms[diagram.name], EXACT, scale=lam_scale,
                                details={"plain_propagators": diagram.plain_propagators}))
    for diagram in sets["mu_prime"]:
        reports.append(WIReport(f"{diagram.name} term of the lambda6 flow",
                                diagram.value / (16.0 * SQRT2 * g ** 1.5), lam6_terms[diagram.name], EXACT,
                                scale=lam6_scale, details={"plain_propagators": diagram.plain_propagators}))
    return reports


# --- local WIs -----------------------------------------------------------------------

def _max_relative(pairs: List[Tuple[float, float, float]]) -> Tuple[float, float, float]:
    """The (lhs, rhs, scale) triple with the largest relative residual."""
    return max(pairs, key=lambda t: abs(t[0] - t[1]) / (t[2] or 1.0))


def local_WI_check(traj: FlowTrajectory, params: ModelParams) -> List[WIReport]:
    """
    Leading-order local WIs along a trajectory whose source couplings were run
    by flows.source_couplings: 2γ^{(3-d)h/2}μ^{J0} = E, E^{J1} = √2(1-A),
    E^{J0} = -√2B, J = B, K = 2(A-1) and E² + ZB = Zε⁻¹.

    Each report holds the worst state; it passes when the residual is within
    LEADING_ORDER_BAND·λ of the identity's natural size.
    """
    if not traj.states:
        raise DomainError("Empty trajectory")
    d = traj.meta.get("d", params.d)
    gamma = traj.meta.get("gamma", params.gamma)
    eps = epsilon(params)
    band = LEADING_ORDER_BAND * params.lam

    checks = {
        "2 gamma^((3-d)h/2) mu^J0 = E": [
            (2.0 * gamma ** ((3 - d) * s.h / 2.0) * s.mu_J0, s.E, abs(s.E)) for s in traj.states],
        "E^J1 = sqrt2 (1-A)": [(s.E_J1, SQRT2 * (1.0 - s.A), 1.0) for s in traj.states],
        "E^J0 = -sqrt2 B": [(s.E_J0, -SQRT2 * s.B, SQRT2 * abs(s.B)) for s in traj.states],
        "J = B": [(s.J, s.B, abs(s.B)) for s in traj.states],
        "K = 2(A-1)": [(s.K, 2.0 * (s.A - 1.0), 1.0) for s in traj.states],
        "E^2 + Z B = Z/eps": [(s.E ** 2 + s.Z * s.B, s.Z / eps, s.Z / eps) for s in traj.states],
    }
    reports = []
    for name, pairs in checks.items():
        if any(math.isnan(v) for triple in pairs for v in triple[:2]):
            raise DomainError(f"Trajectory lacks the couplings needed for '{name}'")
        lhs, rhs, scale = _max_relative(pairs)
        reports.append(WIReport(name, lhs, rhs, LEADING_ORDER, tolerance=band, scale=scale or 1.0,
                                details={"states": len(pairs), "b_variant": traj.meta.get("b_variant")}))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning(f"Local WIs outside the O(lambda) band: {failed}")
    return reports


def wi_A_quadrature(p: Momentum, h: int, params: ModelParams,
                    quad_spec: QuadratureSpec = QuadratureSpec(scheme="product_gauss")) -> WIReport:
    """One-loop local WI for A_h in 3d by quadrature."""
    if params.d != 3:
        raise DomainError(f"wi_A_quadrature needs d=3, got d={params.d}")
    result = wi_A_oneloop(p, h, params, quad_spec)
    rhs = result["rhs0"] - result["rhs1"]
    scale = max(abs(result["lhs"]), abs(rhs)) or 1.0
    return WIReport("sqrt2[W02(p)-W02(0)] = W01;0(p) - W01;1(p)", result["lhs"], rhs, QUADRATURE,
                    tolerance=1e-6, scale=scale, details={"p0": p.k0, "p": p.kvec_norm, "h": h})


def run_ward_suite(params: ModelParams, h: int = -5, betas: Optional[Mapping[int, float]] = None,
                   traj: Optional[FlowTrajectory] = None) -> List[WIReport]:
    """Every applicable identity for the given dimension."""
    reports = tree_level_global(params)
    if params.d == 3:
        reports += oneloop_global_3d(params, h)
    elif params.d == 2:
        if betas is None:
            raise DomainError("The 2d one-loop WIs need the beta table")
        reports += oneloop_global_2d(params, h, betas)
    if traj is not None:
        reports += local_WI_check(traj, params)
    logger.info(f"Ward suite: {sum(r.passed for r in reports)}/{len(reports)} identities within tolerance")
    return reports
