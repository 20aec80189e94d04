"""Bogoliubov-approximation observables of the dilute Bose gas."""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError
from .model import ModelParams, vhat
from .quadrature import QuadratureSpec, quad, sphere_area

logger = logging.getLogger(__name__)

LHY_COEFFICIENT = 128.0 / (15.0 * math.sqrt(math.pi))


@dataclass
class ThermoResult:
    """Observable value with its quadrature error and named contributions."""
    value: float
    error: float = 0.0
    terms: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, float]:
        return {"value": self.value, "error": self.error, **self.terms}


def lhy_coefficient() -> float:
    return LHY_COEFFICIENT


def scattering_length(params: ModelParams) -> float:
    """Born scattering length a₀ = λv̂(0)/8π."""
    return params.lam * params.vhat0 / (8.0 * math.pi)


def _g(k, params: ModelParams, potential: str):
    return params.lam * params.rho0 * vhat(k, params, potential)


def dispersion(k, params: ModelParams, potential: str = "constant"):
    """Bogoliubov dispersion E_k = √(k⁴ + 2λρ₀v̂(k)k²)."""
    k = np.asarray(k, dtype=float)
    value = np.sqrt(k ** 4 + 2.0 * _g(k, params, potential) * k ** 2)
    return value if value.ndim else float(value)


def sound_speed(params: ModelParams) -> float:
    """c_B = √(2λρ₀v̂(0))."""
    return math.sqrt(2.0 * params.lam * params.rho0 * params.vhat0)


def _f_minus_e(k: float, params: ModelParams, potential: str) -> float:
    """F_k - E_k written as g²/(F_k + E_k) to avoid cancellation at large k."""
    g = _g(k, params, potential)
    big_f = k ** 2 + g
    return g ** 2 / (big_f + math.sqrt(k ** 4 + 2.0 * g * k ** 2))


def radial_integral(func: Callable[[float], float], spec: QuadratureSpec, lower: float = 0.0,
                    upper: Optional[float] = None) -> tuple:
    """∫_{lower}^{upper} func(k) dk, with an infinite upper limit mapped by k = lower + t/(1-t)."""
    if upper is not None:
        return quad(func, lower, upper, spec)

    def mapped(t: float) -> float:
        if t >= 1.0:
            return 0.0
        return func(lower + t / (1.0 - t)) / (1.0 - t) ** 2

    return quad(mapped, 0.0, 1.0, spec)


def _shell(params: ModelParams, d: int) -> float:
    """Angular factor S_d/(2π)^d of a radial momentum integral."""
    return sphere_area(d) / (2.0 * math.pi) ** d


def lhy_integral(params: ModelParams, quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-15),
                 potential: str = "constant") -> tuple:
    """I₀ = -(1/(16π³ρ₀)) ∫d³k (F_k - E_k - g_k²/(2k²))."""

    def integrand(k: float) -> float:
        if k == 0.0:
            return 0.0
        g = _g(k, params, potential)
        return k ** 2 * _f_minus_e(k, params, potential) - g ** 2 / 2.0

    value, err = radial_integral(integrand, quad_spec)
    scale = 4.0 * math.pi / (16.0 * math.pi ** 3 * params.rho0)
    return -scale * value, scale * err


def lhy_closed_form(params: ModelParams) -> float:
    """4πρ₀a₀·(128/(15√π))·√(ρ₀a₀³)."""
    a0 = scattering_length(params)
    return 4.0 * math.pi * params.rho0 * a0 * LHY_COEFFICIENT * math.sqrt(params.rho0 * a0 ** 3)


def ground_state_energy(params: ModelParams, quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-15),
                        potential: Optional[str] = None) -> ThermoResult:
    """
    Bogoliubov ground-state energy per particle.

    3d: e₀ = g₀/2 + I₀ - I₁ with I₁ = (λ²ρ₀/(32π³))∫v̂(k)²/k² d³k, defined for the
    exponential potential only (reported as NaN with constant v̂, where e₀ = g₀/2 + I₀).
    2d: e₀ = g₀/2 - (1/(2ρ₀(2π)²))∫(F_k - E_k)d²k with the exponential potential.
    """
    g0 = params.lam * params.rho0 * params.vhat0
    if params.d == 3:
        potential = potential or "constant"
        i0, err0 = lhy_integral(params, quad_spec, potential)
        if potential == "constant":
            i1, err1 = float("nan"), 0.0
            value = g0 / 2.0 + i0
        else:
            raw, err1 = radial_integral(lambda k: vhat(k, params, potential) ** 2, quad_spec)
            i1 = params.lam ** 2 * params.rho0 * 4.0 * math.pi * raw / (32.0 * math.pi ** 3)
            value = g0 / 2.0 + i0 - i1
        logger.info(f"3d energy: e0={value:.10e} (I0={i0:.4e}, I1={i1:.4e})")
        return ThermoResult(value, err0 + err1, {"leading": g0 / 2.0, "I0": i0, "I1": i1})

    if params.d == 2:
        potential = potential or "exponential"
        if potential == "constant":
            raise DomainError("The 2d Bogoliubov energy needs a decaying potential")
        raw, err = radial_integral(lambda k: k * _f_minus_e(k, params, potential), quad_spec)
        correction = -raw * 2.0 * math.pi / (2.0 * params.rho0 * (2.0 * math.pi) ** 2)
        return ThermoResult(g0 / 2.0 + correction, err, {"leading": g0 / 2.0, "correction": correction})

    raise DomainError(f"ground_state_energy supports d in (2, 3), got d={params.d}")


def chemical_potential(params: ModelParams, order: str = "leading",
                       quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-15),
                       potential: str = "exponential") -> float:
    """
    Chemical potential in the Bogoliubov approximation.

    leading: λv̂(0)ρ₀. corrected: g₀ + ½∫(λv̂₀+λv̂_k)(F_k-E_k)/E_k - ½∫λv̂_k g_k/E_k,
    both integrals over dᵈk/(2π)ᵈ, with μ → λv̂(0)ρ₀ inside F_k.
    """
    g0 = params.lam * params.rho0 * params.vhat0
    if order == "leading":
        return g0
    if order != "corrected":
        raise DomainError(f"order must be 'leading' or 'corrected', got '{order}'")
    if potential == "constant" and params.d >= 2:
        raise DomainError("The corrected chemical potential needs a decaying potential")

    lam = params.lam
    v0 = params.vhat0
    d = params.d

    def integrand(k: float) -> float:
        if k == 0.0:
            return 0.0
        vk = vhat(k, params, potential)
        gk = lam * params.rho0 * vk
        e_k = math.sqrt(k ** 4 + 2.0 * gk * k ** 2)
        first = (lam * v0 + lam * vk) * _f_minus_e(k, params, potential) / e_k
        second = lam * vk * gk / e_k
        return k ** (d - 1) * 0.5 * (first - second)

    value, _ = radial_integral(integrand, quad_spec)
    return g0 + _shell(params, d) * value


def depletion(params: ModelParams, d: Optional[int] = None, ir_cutoff: float = 0.0,
              quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-15)) -> float:
    """
    (2π)^{-d}∫(F_k/E_k - 1)dᵈk over |k| ≥ ir_cutoff, constant v̂.

    Raises:
        DomainError: if d = 1 without a positive ir_cutoff
    """
    d = d or params.d
    if d == 1 and not ir_cutoff > 0:
        raise DomainError("The d=1 depletion diverges; pass a positive ir_cutoff")
    g = params.lam * params.rho0 * params.vhat0

    def integrand(k: float) -> float:
        if k == 0.0:
            return 0.0
        e_k = math.sqrt(k ** 4 + 2.0 * g * k ** 2)
        # F/E - 1 = (F - E)/E
        return k ** (d - 1) * (g ** 2 / (k ** 2 + g + e_k)) / e_k

    value, _ = radial_integral(integrand, quad_spec, lower=ir_cutoff)
    return sphere_area(d) / (2.0 * math.pi) ** d * value


def finite_T_depletion(params: ModelParams, beta: float, ir_cutoff: float = 0.0,
                       quad_spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-15)) -> float:
    """Thermal depletion (2π)^{-d}∫(F_k/E_k)(e^{βE_k}-1)^{-1}dᵈk over |k| ≥ ir_cutoff."""
    if params.d not in (2, 3):
        raise DomainError(f"finite_T_depletion supports d in (2, 3), got d={params.d}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    g = params.lam * params.rho0 * params.vhat0
    d = params.d

    def integrand(k: float) -> float:
        if k == 0.0:
            return 0.0
        e_k = math.sqrt(k ** 4 + 2.0 * g * k ** 2)
        x = beta * e_k
        if x > 700.0:
            return 0.0
        return k ** (d - 1) * (k ** 2 + g) / e_k / math.expm1(x)

    value, _ = radial_integral(integrand, quad_spec, lower=ir_cutoff)
    return sphere_area(d) / (2.0 * math.pi) ** d * value


def depletion_slope(func: Callable[[float], float], cutoffs: Sequence[float] = (1e-6, 1e-5, 1e-4)) -> float:
    """Least-squares slope of func(cutoff) against log(1/cutoff)."""
    logs = np.log(1.0 / np.asarray(cutoffs, dtype=float))
    values = np.array([func(c) for c in cutoffs])
    return float(np.polyfit(logs, values, 1)[0])


KINK_SCAN_POINTS = 512
DOUBLE_WELL_QUADRATURE = QuadratureSpec(1e-9, 1e-14, max_subdivisions=1000)


def double_well_kinks(xi_sq: float, params: ModelParams, k_cutoff: float, mu: float,
                      potential: str) -> List[float]:
    """Momenta in (0, k_cutoff) where F_x = ±g_x, i.e. where the square root switches on."""
    ks = np.linspace(0.0, k_cutoff, KINK_SCAN_POINTS)
    kinks = set()
    for weight in (0.0, 2.0):
        def edge(k, weight=weight):
            return k ** 2 - mu + params.lam * (params.vhat0 + weight * vhat(k, params, potential)) * xi_sq

        values = edge(ks)
        for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
            kinks.add(float(brentq(lambda k: float(edge(k)), ks[i], ks[i + 1], xtol=1e-14)))
    return sorted(kinks)


def double_well_terms(xi_sq: float, params: ModelParams, k_cutoff: float = 10.0,
                      mu: Optional[float] = None, potential: str = "exponential",
                      quad_spec: QuadratureSpec = DOUBLE_WELL_QUADRATURE) -> Dict[str, float]:
    """
    Terms of the effective potential of the condensate amplitude, x = |ξ|²:
    -μx + ½λv̂₀x² - ½∫dᵈk/(2π)ᵈ (F_x - Re√(F_x² - g_x²)),
    with F_x = k² - μ + λ(v̂₀+v̂_k)x and g_x = λv̂_k x, for |k| ≤ k_cutoff.
    """
    if xi_sq < 0:
        raise DomainError(f"|xi|^2 must be non-negative, got {xi_sq}")
    mu = params.lam * params.vhat0 * params.rho0 if mu is None else mu
    lam = params.lam
    v0 = params.vhat0
    d = params.d

    def integrand(k: float) -> float:
        vk = vhat(k, params, potential)
        big_f = k ** 2 - mu + lam * (v0 + vk) * xi_sq
        small_g = lam * vk * xi_sq
        root = math.sqrt(max(big_f ** 2 - small_g ** 2, 0.0))
        return k ** (d - 1) * (big_f - root)

    kinks = double_well_kinks(xi_sq, params, k_cutoff, mu, potential)
    raw, _ = quad(integrand, 0.0, k_cutoff, quad_spec, points=kinks)
    fluctuation = -0.5 * _shell(params, d) * raw
    return {
        "linear": -mu * xi_sq,
        "quartic": 0.5 * lam * v0 * xi_sq ** 2,
        "fluctuation": fluctuation,
    }


def double_well(xi_sq: float, params: ModelParams, k_cutoff: float = 10.0,
                mu: Optional[float] = None, potential: str = "exponential",
                quad_spec: QuadratureSpec = DOUBLE_WELL_QUADRATURE) -> float:
    """Effective potential W(ξ); depends on ξ only through |ξ|²."""
    return sum(double_well_terms(xi_sq, params, k_cutoff, mu, potential, quad_spec).values())


def double_well_minimum(params: ModelParams, k_cutoff: float = 10.0, mu: Optional[float] = None,
                        potential: str = "exponential") -> Dict[str, float]:
    """Golden-section minimisation of W over |ξ|² in [0, 4ρ₀]."""
    rho0 = params.rho0
    result = minimize_scalar(
        lambda x: double_well(x, params, k_cutoff, mu, potential),
        bracket=(0.0, rho0, 4.0 * rho0), method="golden", options={"xtol": 1e-6},
    )
    x_min = float(result.x)
    terms = double_well_terms(x_min, params, k_cutoff, mu, potential)
    logger.info(f"double well minimum at |xi|^2={x_min:.6f} (rho0={rho0})")
    return {"xi_sq_min": x_min, "W_min": float(result.fun), **terms}
