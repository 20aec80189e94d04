"""
One-loop integrals: beta integrals, cutoff-correction constants, the
correction functions C_ν and the one-loop local Ward identity for A_h.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from ..config import DEFAULT_ABS_FLOOR, DEFAULT_GAUSS_NODES, DEFAULT_MAX_SUBDIVISIONS, DEFAULT_TOL
from .cache import cached
from .errors import DomainError, QuadratureError
from .model import (
    CutoffProfile,
    ModelParams,
    Momentum,
    chi_h,
    cutoff_argument,
    epsilon,
    f_h,
    shell_indicator,
    window_chi,
)

logger = logging.getLogger(__name__)

SCHEMES = ("radial_angular", "product_gauss")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and scheme for loop integrals."""
    rel_tol: float = DEFAULT_TOL
    abs_floor: float = DEFAULT_ABS_FLOOR
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS
    scheme: str = "radial_angular"
    gauss_nodes: int = DEFAULT_GAUSS_NODES

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"Quadrature tolerance must be positive, got {self.rel_tol}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"Unknown quadrature scheme '{self.scheme}', expected one of {SCHEMES}")


def quad(func: Callable[[float], float], lo: float, hi: float, spec: QuadratureSpec,
         points: Optional[Sequence[float]] = None, **kwargs) -> Tuple[float, float]:
    """Adaptive 1d quadrature returning (value, error estimate).

    A result whose error estimate misses the tolerance is returned with a
    warning; a non-finite result raises.

    Raises:
        QuadratureError: if the value is not finite
    """
    if hi <= lo:
        return 0.0, 0.0
    inner = [p for p in (points or ()) if lo < p < hi]
    value, err = integrate.quad(
        func, lo, hi,
        epsabs=spec.abs_floor, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, points=inner or None, **kwargs
    )
    if not math.isfinite(value):
        raise QuadratureError(f"Non-finite quadrature on [{lo}, {hi}]", err)
    if err > max(spec.rel_tol * abs(value), spec.abs_floor) * 10.0:
        logger.warning(f"Quadrature error estimate {err:.3e} above tolerance for value {value:.6e}")
    return value, err


def dblquad(func: Callable[[float, float], float], lo: float, hi: float,
            inner_lo: Callable[[float], float], inner_hi: Callable[[float], float],
            spec: QuadratureSpec, points: Optional[Sequence[float]] = None) -> Tuple[float, float]:
    """Nested adaptive quadrature ∫_{lo}^{hi} dx ∫_{inner_lo(x)}^{inner_hi(x)} dy func(x, y)."""
    inner_spec = QuadratureSpec(spec.rel_tol * 0.1, spec.abs_floor * 0.1, spec.max_subdivisions)

    def outer(x: float) -> float:
        return quad(lambda y: func(x, y), inner_lo(x), inner_hi(x), inner_spec)[0]

    return quad(outer, lo, hi, spec, points=points)


def gauss_legendre(lo: float, hi: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights mapped to [lo, hi]."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def sphere_area(d: int) -> float:
    """Area S_d of the unit sphere in d dimensions."""
    return 2.0 * math.pi ** (d / 2.0) / gamma_fn(d / 2.0)


# --- beta integrals ---------------------------------------------------------

def f0_weight(t: float, profile: CutoffProfile) -> float:
    """Scale-zero weight entering the 2d beta integrals.

    The sharp kind is the step function on the support shell [aγ^{-2}, b].
    """
    if profile.kind == "sharp":
        return shell_indicator(t, profile.gamma)
    return f_h(t, 0, profile)


def f0_support(profile: CutoffProfile, shell: bool = True) -> Tuple[float, float]:
    """Support of the scale-zero weight in t = ρ²."""
    if profile.kind == "sharp" and not shell:
        return profile.gamma ** -2, 1.0
    return profile.a / profile.gamma ** 2, profile.b


def beta_tilde_closed_form(n: int, gamma: float) -> float:
    """Closed form of β̃ₙ = βₙ/(1-γ^{-1}) for the step function on the support shell."""
    pref = math.sqrt(2.0 / (gamma ** 2 + 1.0)) / (2.0 * math.pi ** 2)
    g2 = gamma ** 2
    if n == 0:
        return pref * (2.0 / 3.0) * (g2 + gamma + 1.0) * (gamma ** 3 + 1.0) / (g2 * (g2 + 1.0))
    if n == 1:
        return pref * (gamma + 1.0)
    if n == 2:
        return pref * (g2 + 1.0) * (gamma + 1.0) / 2.0
    if n == 3:
        return pref * (g2 + 1.0) ** 2 * (g2 + gamma + 1.0) * (gamma ** 3 + 1.0) / (12.0 * g2)
    raise DomainError(f"beta integrals are defined for n in 0..3, got n={n}")


def beta_closed_form_2d(n: int, gamma: float) -> float:
    """βₙ²ᵈ(γ) = (1-γ^{-1})·β̃ₙ(γ)."""
    return (1.0 - 1.0 / gamma) * beta_tilde_closed_form(n, gamma)


def beta2_3d_closed_form(gamma: float) -> float:
    return math.log(gamma) / (8.0 * math.pi ** 2)


@cached("beta")
def beta_integral_2d(n: int, gamma: float, profile_kind: str = "sharp",
                     quad_spec: QuadratureSpec = QuadratureSpec()) -> float:
    """
    βₙ = (2π)^{-3} ∫ dk₀ d²k f₀(k₀²+k²)/(k₀²+k²)ⁿ.

    Args:
        n: Power of the propagator denominator, 0..3
        gamma: Scale ratio
        profile_kind: 'sharp' (support shell) or 'smooth'
        quad_spec: Tolerances; scheme 'radial_angular' integrates the reduced
            radial form, 'product_gauss' the cylindrical (k₀, |k|) form

    Returns:
        βₙ
    """
    if n not in (0, 1, 2, 3):
        raise DomainError(f"beta integrals are defined for n in 0..3, got n={n}")
    profile = CutoffProfile(profile_kind, gamma)
    lo, hi = f0_support(profile)

    if quad_spec.scheme == "radial_angular":
        value, err = quad(
            lambda rho: rho ** (2 - 2 * n) * f0_weight(rho ** 2, profile),
            math.sqrt(lo), math.sqrt(hi), quad_spec
        )
        result = 4.0 * math.pi * value / (2.0 * math.pi) ** 3
    else:
        value, err = dblquad(
            lambda k0, r: r * f0_weight(k0 ** 2 + r ** 2, profile) / (k0 ** 2 + r ** 2) ** n,
            0.0, math.sqrt(hi),
            lambda k0: math.sqrt(max(lo - k0 ** 2, 0.0)),
            lambda k0: math.sqrt(max(hi - k0 ** 2, 0.0)),
            quad_spec, points=[math.sqrt(lo)]
        )
        result = 2.0 * 2.0 * math.pi * value / (2.0 * math.pi) ** 3
    logger.debug(f"beta_{n}(gamma={gamma}, {profile_kind}) = {result:.12e} (err {err:.1e})")
    return result


def beta_tilde_2d(n: int, gamma: float, profile_kind: str = "sharp",
                  quad_spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Quadrature value of β̃ₙ = βₙ/(1-γ^{-1})."""
    return beta_integral_2d(n, gamma, profile_kind, quad_spec) / (1.0 - 1.0 / gamma)


@cached("beta")
def beta2_3d(gamma: float, profile_kind: str = "sharp",
             quad_spec: QuadratureSpec = QuadratureSpec()) -> float:
    """β₂³ᵈ = (2π)^{-4} ∫ d⁴k f₀(k)/(k₀²+k²)²; log γ/(8π²) for any f₀ equal to 1 at 0."""
    profile = CutoffProfile(profile_kind, gamma)
    lo, hi = f0_support(profile, shell=False)

    if quad_spec.scheme == "radial_angular":
        value, _ = quad(
            lambda rho: f_h(rho ** 2, 0, profile) / rho,
            math.sqrt(lo), math.sqrt(hi), quad_spec
        )
        return 2.0 * math.pi ** 2 * value / (2.0 * math.pi) ** 4

    value, _ = dblquad(
        lambda k0, r: r ** 2 * f_h(k0 ** 2 + r ** 2, 0, profile) / (k0 ** 2 + r ** 2) ** 2,
        0.0, math.sqrt(hi),
        lambda k0: math.sqrt(max(lo - k0 ** 2, 0.0)),
        lambda k0: math.sqrt(max(hi - k0 ** 2, 0.0)),
        quad_spec, points=[math.sqrt(lo)]
    )
    return 2.0 * 4.0 * math.pi * value / (2.0 * math.pi) ** 4


# --- angular cancellation -----------------------------------------------------

def angular_integrand(k0: float, y: float, profile: CutoffProfile) -> float:
    """f(ρ²)(y² - k₀²)/(y² + k₀²)² with y = |k|², ρ² = k₀² + y²."""
    rho_sq = k0 ** 2 + y ** 2
    if rho_sq == 0.0:
        return 0.0
    return f_h(rho_sq, 0, profile) * (y ** 2 - k0 ** 2) / rho_sq ** 2


def angular_cancellation(profile: CutoffProfile = CutoffProfile("sharp", 2.0),
                         quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-12)) -> float:
    """∫∫ dk₀ dy f(k)(k⁴ - k₀²)/(k⁴ + k₀²)²; zero since the angular factor is cos 2θ."""
    lo, hi = f0_support(profile, shell=False)
    value, err = dblquad(
        lambda k0, y: angular_integrand(k0, y, profile),
        0.0, math.sqrt(hi),
        lambda k0: math.sqrt(max(lo - k0 ** 2, 0.0)),
        lambda k0: math.sqrt(max(hi - k0 ** 2, 0.0)),
        quad_spec, points=[math.sqrt(lo)]
    )
    logger.debug(f"angular cancellation ({profile.kind}): {value:.3e} (err {err:.1e})")
    return value


# --- cutoff-correction constant μ₀^{J̃₀}/λ -------------------------------------

def mu_tilde_closed_form(d: int, gamma: float) -> float:
    """Closed form of μ₀^{J̃₀}/λ; vanishes at γ = 1 and is positive above it."""
    g2 = gamma ** 2
    if d == 2:
        return (g2 - 1.0) / (16.0 * math.pi * (g2 + 1.0))
    if d == 3:
        gamma_m14 = gamma_fn(-0.25)
        bracket = -3.0 * (g2 + 1.0) * (math.sqrt(gamma) - 1.0) + 1.6 * (gamma ** 2.5 - 1.0)
        return (gamma_m14 ** 2 / (30.0 * math.sqrt(2.0 * math.pi))) * 2.0 ** 0.25 \
            * (g2 + 1.0) ** -1.25 * bracket / (8.0 * math.pi ** 3)
    raise DomainError(f"mu tilde is defined for d in (2, 3), got d={d}")


def mu_tilde_printed_3d(gamma: float) -> float:
    """The 3d bracket as printed, γ^{1/2}(5γ²+1)+3γ²-5; nonzero at γ = 1, kept for comparison."""
    g2 = gamma ** 2
    bracket = math.sqrt(gamma) * (5.0 * g2 + 1.0) + 3.0 * g2 - 5.0
    return (gamma_fn(-0.25) ** 2 / (30.0 * math.sqrt(2.0 * math.pi))) * 2.0 ** 0.25 \
        * (g2 + 1.0) ** -1.25 * bracket / (8.0 * math.pi ** 3)


@cached("mu_tilde")
def correction_mu_tilde(d: int, gamma: float,
                        quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-14)) -> float:
    """
    μ₀^{J̃₀}/λ by Cartesian quadrature over (k₀, y = |k|²) on the annulus ρ² ∈ [a, b].

    2d: -(1/4π²)∫∫ (y²-k₀²)/(y²+k₀²)²(1+2k₀²);
    3d: -(1/4π³)∫∫ √y (y²-k₀²)/(y²+k₀²)²(1+2k₀²), with y = u² to remove the √y cusp.
    """
    profile = CutoffProfile("sharp", gamma)
    a, b = profile.a, profile.b

    def kernel(k0: float, y: float) -> float:
        rho_sq = k0 ** 2 + y ** 2
        return (y ** 2 - k0 ** 2) / rho_sq ** 2 * (1.0 + 2.0 * k0 ** 2)

    if d == 2:
        value, _ = dblquad(
            kernel, 0.0, math.sqrt(b),
            lambda k0: math.sqrt(max(a - k0 ** 2, 0.0)),
            lambda k0: math.sqrt(max(b - k0 ** 2, 0.0)),
            quad_spec, points=[math.sqrt(a)]
        )
        return -value / (4.0 * math.pi ** 2)
    if d == 3:
        value, _ = dblquad(
            lambda k0, u: 2.0 * u ** 2 * kernel(k0, u ** 2), 0.0, math.sqrt(b),
            lambda k0: max(a - k0 ** 2, 0.0) ** 0.25,
            lambda k0: max(b - k0 ** 2, 0.0) ** 0.25,
            quad_spec, points=[math.sqrt(a)]
        )
        return -value / (4.0 * math.pi ** 3)
    raise DomainError(f"mu tilde is defined for d in (2, 3), got d={d}")


# --- correction functions C_ν -------------------------------------------------

def _inverse_minus_one(chi: np.ndarray) -> np.ndarray:
    """χ^{-1} - 1, taken as 0 where χ vanishes (the propagators vanish there too)."""
    chi = np.asarray(chi, dtype=float)
    safe = np.where(chi > 0.0, chi, 1.0)
    return np.where(chi > 0.0, 1.0 / safe - 1.0, 0.0)


def c_nu(k0, kn, p0, pn, nu: int, hstar: int, profile: CutoffProfile, cos_angle=1.0):
    """
    Cutoff-correction function of the local Ward identities.

    C₀ = ½[(k₀+p₀)(χ^{-1}(k+p)-1) - k₀(χ^{-1}(k)-1)],
    C₁ = |k+p|²(χ^{-1}(k+p)-1) - |k|²(χ^{-1}(k)-1),
    with χ the cutoff of the window [h*, 0]. Vectorised over its momentum arguments.
    """
    if nu not in (0, 1):
        raise DomainError(f"nu must be 0 or 1, got {nu}")
    k0 = np.asarray(k0, dtype=float)
    kn = np.asarray(kn, dtype=float)
    qn = np.sqrt(np.maximum(kn ** 2 + pn ** 2 + 2.0 * kn * pn * cos_angle, 0.0))
    q0 = k0 + p0
    g_q = _inverse_minus_one(window_chi(cutoff_argument(q0, qn), hstar, profile))
    g_k = _inverse_minus_one(window_chi(cutoff_argument(k0, kn), hstar, profile))
    if nu == 0:
        return 0.5 * (q0 * g_q - k0 * g_k)
    return qn ** 2 * g_q - kn ** 2 * g_k


def delta_product(j: int, l: int, k0, kn, p0: float, pn: float, nu: int, hstar: int,
                  profile: CutoffProfile, cos_angle=1.0):
    """f_j(k+p)·C_ν(k,p)·f_l(k) on arrays of momenta."""
    k0 = np.asarray(k0, dtype=float)
    kn = np.asarray(kn, dtype=float)
    qn = np.sqrt(np.maximum(kn ** 2 + pn ** 2 + 2.0 * kn * pn * cos_angle, 0.0))
    return f_h(cutoff_argument(k0 + p0, qn), j, profile) \
        * c_nu(k0, kn, p0, pn, nu, hstar, profile, cos_angle) \
        * f_h(cutoff_argument(k0, kn), l, profile)


def sample_grid(h: int, profile: CutoffProfile, n: int = 121) -> Tuple[np.ndarray, np.ndarray]:
    """(k₀, |k|) mesh covering the support of χ_h."""
    k0_max = math.sqrt(profile.b) * profile.gamma ** h * 1.2
    kn_max = profile.b ** 0.25 * profile.gamma ** (h / 2.0) * 1.2
    return np.meshgrid(np.linspace(-k0_max, k0_max, n), np.linspace(0.0, kn_max, n), indexing="ij")


def delta_support(j: int, l: int, hstar: int, profile: CutoffProfile,
                  p: Momentum = Momentum(0.05, 0.05), nu: int = 0, n: int = 121) -> Dict[str, float]:
    """
    Check that f_j(k+p) C_ν f_l(k) vanishes identically when h* < j, l < 0.

    Returns:
        {"max_abs": sup of the product on the sample grid, "vanishes": 1.0 or 0.0,
        "interior": 1.0 when both indices are strictly inside the window}
    """
    if not hstar < 0:
        raise DomainError(f"hstar must be negative, got {hstar}")
    k0, kn = sample_grid(max(j, l), profile, n)
    values = delta_product(j, l, k0, kn, p.k0, p.kvec_norm, nu, hstar, profile)
    max_abs = float(np.max(np.abs(values)))
    return {
        "max_abs": max_abs,
        "vanishes": float(max_abs == 0.0),
        "interior": float(hstar < j < 0 and hstar < l < 0),
    }


def delta00_constant(p0_values: Iterable[float], hstar: int, profile: CutoffProfile,
                     n: int = 161) -> List[float]:
    """sup_k |f₀(k+p) C₀(k,p) f₀(k)|/|p₀| for each temporal p = (p₀, 0)."""
    k0, kn = sample_grid(0, profile, n)
    constants = []
    for p0 in p0_values:
        values = delta_product(0, 0, k0, kn, p0, 0.0, 0, hstar, profile)
        constants.append(float(np.max(np.abs(values))) / abs(p0))
    return constants


# --- last-scale singular integral ---------------------------------------------

def _edge_radii(delta: float, hstar: int, profile: CutoffProfile) -> Tuple[float, float, float]:
    """Radii where f_{h*}(ρ²) = δ below and above the peak, and the peak radius."""
    from scipy.optimize import brentq

    g = profile.gamma
    rho_lo = math.sqrt(profile.a * g ** (2 * hstar - 2))
    rho_peak = math.sqrt(profile.a * g ** (2 * hstar))
    rho_hi = math.sqrt(profile.b * g ** (2 * hstar))
    if delta <= 0.0:
        return rho_lo, rho_hi, rho_peak

    def excess(rho: float) -> float:
        return f_h(rho ** 2, hstar, profile) - delta

    left = brentq(excess, rho_lo, rho_peak, xtol=1e-15 * rho_peak, rtol=1e-15)
    right = brentq(excess, rho_peak, rho_hi, xtol=1e-15 * rho_peak, rtol=1e-15)
    return left, right, rho_peak


def last_scale_integral(p0: float, hstar: int, params: ModelParams, delta: float = 0.0,
                        quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 0.0, 500)) -> float:
    """
    I₁(p₀) = (2π)^{-(d+1)} S_d ∫ dρ ρ^{d+3} f(ρ²)·2π/(m(p₀²+4m²)), m = √(Z f) ρ, Z = ε,
    restricted to the region f_{h*} ≥ δ.
    """
    profile = CutoffProfile("smooth", params.gamma)
    d = params.d
    z = epsilon(params)
    left, right, peak = _edge_radii(delta, hstar, profile)

    def integrand(rho: float) -> float:
        f = f_h(rho ** 2, hstar, profile)
        if f <= 0.0:
            return 0.0
        m = math.sqrt(z * f) * rho
        return rho ** (d + 3) * f * 2.0 * math.pi / (m * (p0 ** 2 + 4.0 * m ** 2))

    value = quad(integrand, left, peak, quad_spec)[0] + quad(integrand, peak, right, quad_spec)[0]
    return value * sphere_area(d) / (2.0 * math.pi) ** (d + 1)


def last_scale_demo(hstar: int, params: ModelParams,
                    deltas: Sequence[float] = (1e-14, 1e-13, 1e-12, 1e-11, 1e-10),
                    p0_sweep: Sequence[float] = (4.0, 2.0, 1.0, 0.5, 0.25)) -> Dict[str, object]:
    """
    Lowest-scale integral at zero and at finite external frequency.

    At p₀ = 0 the integral over {f ≥ δ} diverges as δ^{-1/2} up to a
    logarithmic factor; the fit log I = α log δ + β log log(1/δ) + c isolates α.
    At p₀ = γ^{h*} the integral is finite and compared with
    γ^{(d+1)h*} ε^{-d/2} Z^{-2}.

    Returns:
        Report with the fitted exponent, the raw log-log slope, the finite value,
        its ratio to the bound and the monotone p₀ sweep (p₀ in units of γ^{h*}).
    """
    logs = np.log(np.asarray(deltas, dtype=float))
    values = np.array([last_scale_integral(0.0, hstar, params, delta=dl) for dl in deltas])
    design = np.column_stack([logs, np.log(-logs), np.ones_like(logs)])
    coeffs, *_ = np.linalg.lstsq(design, np.log(values), rcond=None)
    raw_slope = float(np.polyfit(logs, np.log(values), 1)[0])

    g_hstar = params.gamma ** hstar
    eps = epsilon(params)
    finite = last_scale_integral(g_hstar, hstar, params)
    bound = params.gamma ** ((params.d + 1) * hstar) * eps ** (-params.d / 2.0) * eps ** -2
    sweep = [last_scale_integral(s * g_hstar, hstar, params) for s in p0_sweep]
    logger.info(f"last scale: edge exponent {coeffs[0]:.3f}, finite/bound {finite / bound:.3e}")
    return {
        "edge_exponent": float(coeffs[0]),
        "raw_slope": raw_slope,
        "I1_at_p0_eq_0": values.tolist(),
        "I1_at_p0_eq_gamma_hstar": finite,
        "bound": bound,
        "bound_ratio": finite / bound,
        "bound_check": bool(finite / bound <= 10.0),
        "p0_sweep": list(p0_sweep),
        "sweep_values": sweep,
    }


# --- one-loop local WI for A_h --------------------------------------------------

@cached("wi_A")
def wi_A_oneloop(p: Momentum, h: int, params: ModelParams,
                 quad_spec: QuadratureSpec = QuadratureSpec(scheme="product_gauss")) -> Dict[str, float]:
    """
    One-loop check of √2[Ŵ₀₂(p) - Ŵ₀₂(0)] = Ŵ₀₁;₀(p) - Ŵ₀₁;₁(p) in d = 3.

    With c = λε^{-3/2}μ_h, χ_h(k) = χ(γ^{-2h}(k₀²+|k|⁴)) and D = (|k|²+χ)|k|² + k₀²:
      lhs  = √2[-2c∫χ₁χ₂((a₁+χ₁)a₂ + q₀k₀)/(D₁D₂) + 2c∫χ²/D]
      rhs0 = √2c∫(χ₁k₀ - χ₂q₀)²/(D₁D₂)
      rhs1 = -√2c∫(χ₁a₂ - χ₂a₁)²/(D₁D₂)
    where index 1 refers to k+p and 2 to k. The product Gauss grid is centred at
    -p/2, which makes the change of variables k+p → -k an exact symmetry of the
    discrete sum; the tadpole ∫χ²/D is taken as the mean of its two shifted copies.

    Returns:
        {"lhs", "rhs0", "rhs1", "residual"} with residual = lhs - (rhs0 - rhs1)
    """
    profile = CutoffProfile("smooth", params.gamma)
    eps = epsilon(params)
    mu_h = math.sqrt(2.0) * eps / 4.0
    c = params.lam * eps ** -1.5 * mu_h
    g = params.gamma
    n = quad_spec.gauss_nodes
    p0, pn = p.k0, p.kvec_norm

    s0_max = math.sqrt(profile.b) * g ** h + abs(p0) / 2.0
    r_max = profile.b ** 0.25 * g ** (h / 2.0) + pn / 2.0
    s0, w0 = gauss_legendre(-s0_max, s0_max, n)
    r, wr = gauss_legendre(0.0, r_max, n)
    u, wu = gauss_legendre(-1.0, 1.0, n)
    S0, R, U = np.meshgrid(s0, r, u, indexing="ij")
    W = w0[:, None, None] * (wr * r ** 2)[None, :, None] * wu[None, None, :]
    W = W * 2.0 * math.pi / (2.0 * math.pi) ** 4

    q0 = S0 + p0 / 2.0
    k0 = S0 - p0 / 2.0
    a1 = R ** 2 + R * U * pn + pn ** 2 / 4.0
    a2 = R ** 2 - R * U * pn + pn ** 2 / 4.0
    chi1 = chi_h(q0 ** 2 + a1 ** 2, h, profile)
    chi2 = chi_h(k0 ** 2 + a2 ** 2, h, profile)
    D1 = (a1 + chi1) * a1 + q0 ** 2
    D2 = (a2 + chi2) * a2 + k0 ** 2
    D12 = D1 * D2

    bubble = chi1 * chi2 * ((a1 + chi1) * a2 + q0 * k0) / D12
    tadpole = 0.5 * (chi1 ** 2 / D1 + chi2 ** 2 / D2)
    sqrt2c = math.sqrt(2.0) * c
    lhs = sqrt2c * float(np.sum(W * (-2.0 * bubble + 2.0 * tadpole)))
    rhs0 = sqrt2c * float(np.sum(W * (chi1 * k0 - chi2 * q0) ** 2 / D12))
    rhs1 = -sqrt2c * float(np.sum(W * (chi1 * a2 - chi2 * a1) ** 2 / D12))
    residual = lhs - (rhs0 - rhs1)
    logger.debug(f"WI_A at p=({p0}, {pn}): lhs={lhs:.6e} residual={residual:.2e}")
    return {"lhs": lhs, "rhs0": rhs0, "rhs1": rhs1, "residual": residual}
