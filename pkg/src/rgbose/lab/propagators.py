"""
Bogoliubov and renormalized 2x2 propagators, single-scale real-space
propagators and the empirical check of their decay bounds.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.special import j0

from .errors import DomainError
from .model import CutoffProfile, ModelParams, Momentum, epsilon, f_h, hbar_scale, kappa, vhat
from .quadrature import QuadratureSpec, gauss_legendre, quad, sphere_area

logger = logging.getLogger(__name__)

LT_LABELS = ("l", "t")
PM_LABELS = ("+", "-")

# Relative drift of C_N allowed when the sample window doubles
BOUND_STABILITY = 0.1
GRID_SPACING = 0.5
MAX_WINDOW_RADIUS = 32.0


@dataclass(frozen=True)
class WaveFunctionRenorms:
    """Wave-function renormalization constants at one scale."""
    Z: float
    A: float = 1.0
    B: float = 0.0
    E: float = 1.0


def _check_momentum(k: Momentum) -> None:
    if k.is_zero:
        raise DomainError("Propagator is singular at k = 0")


def bogoliubov_pm(k: Momentum, params: ModelParams, potential: str = "constant") -> np.ndarray:
    """
    Inverse of the quadratic form [[-ik₀+k²+g, g], [g, ik₀+k²+g]], g = λρ₀v̂(k).

    Rows are labelled by ψ⁻, ψ⁺ and columns by ψ⁺, ψ⁻, so that entry [0, 0]
    is the ⟨ψ⁻ψ⁺⟩ contraction.
    """
    _check_momentum(k)
    g = params.lam * params.rho0 * vhat(k.kvec_norm, params, potential)
    ksq = k.ksq
    form = np.array([[-1j * k.k0 + ksq + g, g], [g, 1j * k.k0 + ksq + g]], dtype=complex)
    return np.linalg.inv(form)


def bogoliubov_lt(k: Momentum, params: ModelParams, potential: str = "constant") -> np.ndarray:
    """
    Propagator of the longitudinal and transverse fields,
    (1/ρ₀)[[k², k₀], [-k₀, k²+2g]] / (k₀² + k²(k²+2g)).
    """
    _check_momentum(k)
    g = params.lam * params.rho0 * vhat(k.kvec_norm, params, potential)
    ksq = k.ksq
    den = bogoliubov_denominator(k, params, potential)
    numerator = np.array([[ksq, k.k0], [-k.k0, ksq + 2.0 * g]], dtype=complex)
    return numerator / (params.rho0 * den)


def bogoliubov_denominator(k: Momentum, params: ModelParams, potential: str = "constant") -> float:
    g = params.lam * params.rho0 * vhat(k.kvec_norm, params, potential)
    return k.k0 ** 2 + k.ksq * (k.ksq + 2.0 * g)


def pm_from_lt(g_lt: np.ndarray, rho0: float) -> np.ndarray:
    """Change of basis ψ^± = √(ρ₀/2)(ψ^l ± iψ^t), in the row/column order of bogoliubov_pm."""
    c = math.sqrt(rho0 / 2.0)
    rows = c * np.array([[1.0, -1j], [1.0, 1j]])
    cols = c * np.array([[1.0, 1j], [1.0, -1j]])
    return rows @ g_lt @ cols.T


def renormalized_g(k: Momentum, renorms: WaveFunctionRenorms, params: ModelParams) -> np.ndarray:
    """
    Renormalized l/t propagator in R₀ = 1 units:
    [[A k² + B k₀², E k₀], [-E k₀, k² + εZ]] / ((E²+BZ)k₀² + AZk² + k²(Ak²+Bk₀²)),
    with the prefactor (ρ₀R₀^{-2})^{-1}.
    """
    A, B, E, Z = renorms.A, renorms.B, renorms.E, renorms.Z
    eps = epsilon(params)
    k0, ksq = k.k0, k.ksq
    den = (E ** 2 + B * Z) * k0 ** 2 + A * Z * ksq + ksq * (A * ksq + B * k0 ** 2)
    if den == 0.0:
        raise DomainError(f"Renormalized propagator denominator vanishes at k=({k0}, {k.kvec_norm})")
    numerator = np.array([[A * ksq + B * k0 ** 2, E * k0], [-E * k0, ksq + eps * Z]], dtype=complex)
    return numerator / (den * params.rho0 / params.R0 ** 2)


# --- single-scale real-space propagator -----------------------------------------

def _entry_index(pair: str) -> Tuple[int, int]:
    if len(pair) != 2 or any(c not in LT_LABELS for c in pair):
        raise DomainError(f"Basis pair must be two of {LT_LABELS}, got '{pair}'")
    return LT_LABELS.index(pair[0]), LT_LABELS.index(pair[1])


def _numerator(pair: str, k0, ksq, gap: float):
    i, j = _entry_index(pair)
    if (i, j) == (0, 0):
        return ksq
    if (i, j) == (1, 1):
        return ksq + gap
    return k0 if (i, j) == (0, 1) else -k0


def _support(h: int, profile: CutoffProfile, gap: float) -> Tuple[float, float]:
    """Box [0, k0_max] x [0, k_max] containing the support of f_h(k₀² + k²(k²+gap))."""
    t_max = profile.b * profile.gamma ** (2 * h)
    k0_max = math.sqrt(t_max)
    k_max = math.sqrt((-gap + math.sqrt(gap ** 2 + 4.0 * t_max)) / 2.0)
    return k0_max, k_max


def _spatial_kernel(k, r, d: int):
    """Angular average of e^{-ik·x} at |x| = r in d dimensions."""
    if d == 3:
        kr = k * r
        return np.where(kr == 0.0, 1.0, np.sin(kr) / np.where(kr == 0.0, 1.0, kr))
    if d == 2:
        return j0(k * r)
    return np.cos(k * r)


def single_scale_g(x0: float, x: float, h: int, pair: str, params: ModelParams,
                   profile: CutoffProfile = None, quad_spec: QuadratureSpec = QuadratureSpec(scheme="product_gauss"),
                   gap: float = None) -> complex:
    """
    Real-space propagator on scale h in R₀ = 1 units:

        g^{(h)}_{αα'}(x) = (2π)^{-(d+1)} ∫ dk₀ dᵈk f_h(D(k)) p_{αα'}(k)/D(k) e^{-i(k₀x₀ + k·x)},

    with D(k) = k₀² + k²(k²+ε) and p = [[k², k₀], [-k₀, k²+ε]], omitting the
    overall (ρ₀R₀^{-2})^{-1}.

    Args:
        x0: Imaginary time
        x: |x|
        h: Scale, h ≤ 0
        pair: Entry of the l/t matrix, e.g. 'tt' or 'lt'
        params: Model parameters (ε and d)
        profile: Cutoff profile, smooth by default
        quad_spec: 'product_gauss' (vectorised Gauss–Legendre) or 'radial_angular'
            (adaptive quadrature with an oscillatory weight in k₀)
        gap: Override for the gap ε

    Returns:
        Complex value; the l/t entries are imaginary, the diagonal ones real.
    """
    if h > 0:
        raise DomainError(f"Scales are non-positive, got h={h}")
    profile = profile or CutoffProfile("smooth", params.gamma)
    gap = epsilon(params) if gap is None else gap
    d = params.d
    odd = pair in ("lt", "tl")
    k0_max, k_max = _support(h, profile, gap)
    norm = 2.0 * sphere_area(d) / (2.0 * math.pi) ** (d + 1)

    if quad_spec.scheme == "product_gauss":
        # enough nodes to resolve the oscillation at large |x|
        n = max(quad_spec.gauss_nodes, int(math.ceil((k0_max * abs(x0) + k_max * x) / 4.0)) + 16)
        k0, w0 = gauss_legendre(0.0, k0_max, 2 * n)
        kn, wk = gauss_legendre(0.0, k_max, 2 * n)
        K0, K = np.meshgrid(k0, kn, indexing="ij")
        ksq = K ** 2
        den = K0 ** 2 + ksq * (ksq + gap)
        weight = f_h(den, h, profile) * _numerator(pair, K0, ksq, gap) / den
        phase = np.sin(K0 * x0) if odd else np.cos(K0 * x0)
        integrand = weight * phase * K ** (d - 1) * _spatial_kernel(K, x, d)
        value = float(np.sum(w0[:, None] * wk[None, :] * integrand))
    else:
        def over_k0(kn_val: float) -> float:
            ksq = kn_val ** 2

            def inner(k0: float) -> float:
                den = k0 ** 2 + ksq * (ksq + gap)
                if den == 0.0:
                    return 0.0
                return f_h(den, h, profile) * _numerator(pair, k0, ksq, gap) / den

            weight = "sin" if odd else "cos"
            if x0 == 0.0 and not odd:
                return quad(inner, 0.0, k0_max, quad_spec)[0]
            if x0 == 0.0:
                return 0.0
            return quad(inner, 0.0, k0_max, quad_spec, weight=weight, wvar=x0)[0]

        value = quad(
            lambda kn_val: over_k0(kn_val) * kn_val ** (d - 1) * float(_spatial_kernel(kn_val, x, d)),
            0.0, k_max, quad_spec
        )[0]

    value *= norm
    # odd entries: ∫dk₀ k₀ e^{-ik₀x₀} = -2i ∫₀^∞ k₀ sin(k₀x₀)
    return complex(0.0, -value) if odd else complex(value, 0.0)


# --- decay bounds ----------------------------------------------------------------

def above_bound_weight(x0, x, h: int, N: int, gamma: float):
    """1 + [(γ^h x₀)² + (γ^{h/2}|x|)²]^N."""
    return 1.0 + ((gamma ** h * x0) ** 2 + (gamma ** (h / 2.0) * x) ** 2) ** N


def below_bound_weight(x0, x, h: int, N: int, gamma: float, kap: float):
    """1 + [(γ^h x₀)² + (γ^h √κ |x|)²]^N."""
    return 1.0 + ((gamma ** h * x0) ** 2 + (gamma ** h * math.sqrt(kap) * x) ** 2) ** N


def below_bound_prefactor(h: int, pair: str, kap: float, d: int, gamma: float) -> float:
    """κ^{d/2}(κ^{-1}γ^h)^{d-1+δ_{αl}+δ_{α'l}}."""
    n_long = sum(1 for c in pair if c == "l")
    return kap ** (d / 2.0) * (gamma ** h / kap) ** (d - 1 + n_long)


def regime_of(h: int, params: ModelParams) -> str:
    return "above" if h > hbar_scale(params) else "below"


def _unscaled_point(h: int, u0: float, u: float, regime: str, gamma: float, kap: float) -> Tuple[float, float]:
    if regime == "above":
        return gamma ** -h * u0, gamma ** (-h / 2.0) * u
    return gamma ** -h * u0, gamma ** -h * u / math.sqrt(kap)


def _bound_ratio(x0: float, x: float, h: int, N: int, regime: str, pair: str, params: ModelParams) -> float:
    """Decay weight over the bound's scale factor, so |g| times this is C_N at the point."""
    gamma, d = params.gamma, params.d
    if regime == "above":
        return above_bound_weight(x0, x, h, N, gamma) / gamma ** (d * h / 2.0)
    kap = kappa(params)
    return below_bound_weight(x0, x, h, N, gamma, kap) / below_bound_prefactor(h, pair, kap, d, gamma)


def verify_decay_bound(h_list: Sequence[int], N: int, sample_grid: Sequence[Tuple[float, float]],
                       params: ModelParams, pair: str = "tt", C: float = None,
                       quad_spec: QuadratureSpec = QuadratureSpec(scheme="product_gauss")) -> Dict[str, object]:
    """
    Fit the constant C_N of the single-scale decay bound.

    Sample points are given in scaled units (u₀, u): above h̄ the point is
    x = (γ^{-h}u₀, γ^{-h/2}u) and the bound is C_N γ^{dh/2}; below h̄ the
    point is x = (γ^{-h}u₀, γ^{-h}κ^{-1/2}u) and the bound carries the
    prefactor of below_bound_prefactor.

    When C is given the samples are checked against it and max_violation is the
    largest relative excess; otherwise C is fitted as the sup over the samples.

    Raises:
        DomainError: if the scales are not all in one regime

    Returns:
        {"regime", "fitted_C", "per_h": {h: C}, "max_violation"}
    """
    regimes = {regime_of(h, params) for h in h_list}
    if len(regimes) != 1:
        raise DomainError(f"Scales {list(h_list)} straddle h̄={hbar_scale(params):.3f}")
    regime = regimes.pop()
    gamma = params.gamma
    kap = kappa(params)

    ratios: Dict[int, float] = {}
    for h in h_list:
        best = 0.0
        for u0, u in sample_grid:
            x0, x = _unscaled_point(h, u0, u, regime, gamma, kap)
            value = abs(single_scale_g(x0, x, h, pair, params, quad_spec=quad_spec))
            best = max(best, value * _bound_ratio(x0, x, h, N, regime, pair, params))
        ratios[h] = best
    fitted = max(ratios.values())
    reference = fitted if C is None else C
    violation = max(0.0, fitted / reference - 1.0) if reference > 0 else 0.0
    logger.info(f"decay bound {regime} N={N}: C={fitted:.4e}, violation={violation:.3e}")
    return {"regime": regime, "fitted_C": fitted, "per_h": ratios, "max_violation": violation}


def scaled_grid(radius: float, n: int = 5) -> List[Tuple[float, float]]:
    """Points (u₀, u) on a polar grid of the given radius in scaled units."""
    points = [(0.0, 0.0)]
    for rho in np.linspace(radius / n, radius, n):
        for angle in np.linspace(0.0, math.pi / 2.0, 4):
            points.append((float(rho * math.sin(angle)), float(rho * math.cos(angle))))
    return points


def scaling_collapse(h_list: Iterable[int], grid: Sequence[Tuple[float, float]], params: ModelParams,
                     pair: str = "tt") -> Dict[int, List[float]]:
    """γ^{-dh/2}|g^{(h)}(γ^{-h}u₀, γ^{-h/2}u)| on a fixed scaled grid, per h."""
    d = params.d
    gamma = params.gamma
    return {
        h: [
            gamma ** (-d * h / 2.0) * abs(single_scale_g(gamma ** -h * u0, gamma ** (-h / 2.0) * u, h, pair, params))
            for u0, u in grid
        ]
        for h in h_list
    }


def _shell_grid(inner: float, outer: float) -> List[Tuple[float, float]]:
    """Polar grid points with inner < |u| ≤ outer at radial spacing GRID_SPACING."""
    points = [(0.0, 0.0)] if inner == 0.0 else []
    count = max(1, int(math.ceil((outer - inner) / GRID_SPACING)))
    for rho in np.linspace(inner, outer, count + 1)[1:]:
        for angle in np.linspace(0.0, math.pi / 2.0, 4):
            points.append((float(rho * math.sin(angle)), float(rho * math.cos(angle))))
    return points


def propagator_bound_rows(params: ModelParams, h_list: Sequence[int], N_list: Sequence[int],
                          radius: float = 2.0, pair: str = "tt",
                          max_radius: float = MAX_WINDOW_RADIUS) -> List[Dict[str, float]]:
    """
    Rows (h, N, fitted_C, window, max_violation).

    Starting from the given radius the sample window is doubled until the
    fitted C_N moves by at most BOUND_STABILITY, so that C is fitted past the
    peak of the weighted |g|. fitted_C is the sup on the last stable window,
    window its radius, and max_violation the relative growth of C on the
    doubled window. Values of |g| are shared between orders N.

    Raises:
        DomainError: if the scales straddle h̄ or the radii are not positive
    """
    if not 0.0 < radius <= max_radius:
        raise DomainError(f"Window radius must lie in (0, {max_radius}], got {radius}")
    regimes = {regime_of(h, params) for h in h_list}
    if len(regimes) != 1:
        raise DomainError(f"Scales {list(h_list)} straddle h̄={hbar_scale(params):.3f}")
    regime = regimes.pop()
    kap = kappa(params)
    magnitudes: Dict[Tuple[int, float, float], float] = {}

    def window_sup(h: int, N: int, inner: float, outer: float) -> float:
        best = 0.0
        for u0, u in _shell_grid(inner, outer):
            x0, x = _unscaled_point(h, u0, u, regime, params.gamma, kap)
            key = (h, u0, u)
            if key not in magnitudes:
                magnitudes[key] = abs(single_scale_g(x0, x, h, pair, params))
            best = max(best, magnitudes[key] * _bound_ratio(x0, x, h, N, regime, pair, params))
        return best

    rows = []
    for N in N_list:
        for h in h_list:
            window = radius
            fitted = window_sup(h, N, 0.0, window)
            while True:
                doubled = max(fitted, window_sup(h, N, window, 2.0 * window))
                violation = doubled / fitted - 1.0 if fitted > 0 else 0.0
                if violation <= BOUND_STABILITY or 2.0 * window > max_radius:
                    break
                window, fitted = 2.0 * window, doubled
            logger.info(f"decay bound {regime} h={h} N={N}: C={fitted:.4e} on radius {window:g}, "
                        f"violation={violation:.3e}")
            rows.append({"h": h, "N": N, "fitted_C": fitted, "window": window, "max_violation": violation})
    return rows
