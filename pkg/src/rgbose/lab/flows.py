"""
Renormalization-group flows below the crossover scale h̄.

Trajectories are lists of CouplingState ordered by decreasing scale. The 2d
flow is carried by the effective parameters x = λλ_h and y = λλ₆,h; the 3d
flow by the longitudinal wave-function constant Z_h. The other couplings
are filled in from the global and local Ward identities.
"""

import math
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .. import config
from .errors import ConvergenceError, DomainError, NonContractionError
from .model import ModelParams, epsilon, floor_hbar_scale
from .quadrature import beta2_3d, beta_tilde_2d

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
B_VARIANTS = ("propWI", "Bh_complete")
FIXED_POINT_MODES = ("recursion", "ode")

NAN = float("nan")

# Roots of 8 - 12z + (27/8)z² and the corresponding x* = 1/(4 - 3z + (9/4)z²).
QUADRATIC_Z_ROOTS = (8.0 / 9.0, 8.0 / 3.0)
QUADRATIC_X_STAR = 9.0 / 28.0
X_STAR_WITHOUT_SEXTIC = 0.25

Betas = Mapping[int, float]


@dataclass
class CouplingState:
    """Running couplings at one scale; unset entries are NaN."""
    h: int
    lam: float = NAN
    lam6: float = NAN
    mu: float = NAN
    nu: float = NAN
    Z: float = NAN
    A: float = NAN
    B: float = NAN
    E: float = NAN
    omega: float = NAN
    lam_p: float = NAN
    lam_pp: float = NAN
    mu_p: float = NAN
    mu_J0: float = NAN
    mu_J1: float = NAN
    E_J0: float = NAN
    E_J1: float = NAN
    Z_J0: float = NAN
    J: float = NAN
    K: float = NAN
    x: float = NAN
    y: float = NAN
    t: float = NAN

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class FlowTrajectory:
    """Ordered states with strictly decreasing, gap-free scale labels."""
    states: List[CouplingState]
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for prev, cur in zip(self.states, self.states[1:]):
            if cur.h != prev.h - 1:
                raise DomainError(f"Trajectory scales must decrease by one, got {prev.h} then {cur.h}")

    def __len__(self) -> int:
        return len(self.states)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.states], dtype=float)

    @property
    def last(self) -> CouplingState:
        return self.states[-1]

    def rows(self, columns: Sequence[str]) -> List[Dict[str, float]]:
        return [{c: getattr(s, c) for c in columns} for s in self.states]

    def with_states(self, states: List[CouplingState], **meta) -> "FlowTrajectory":
        return FlowTrajectory(states, {**self.meta, **meta})


# --- initial data ------------------------------------------------------------

def initial_couplings_at_hbar(params: ModelParams) -> CouplingState:
    """Leading-order values of the running couplings at the crossover scale."""
    eps = epsilon(params)
    h = floor_hbar_scale(params)
    if params.d == 3:
        lam_h = eps / 16.0
        mu_h = SQRT2 / 4.0 * eps
        return CouplingState(
            h=h, lam=lam_h, mu=mu_h, nu=0.0, Z=eps, A=1.0, B=0.0, E=1.0,
            lam_p=eps ** 2 * lam_h, lam_pp=eps ** 4 * lam_h, mu_p=eps ** 2 * mu_h,
            mu_J0=1.0, mu_J1=eps ** 2, Z_J0=0.0, E_J0=0.0, E_J1=0.0,
        )
    if params.d == 2:
        lam_h = 1.0 / 16.0
        mu_h = SQRT2 / 4.0 * math.sqrt(eps)
        return CouplingState(
            h=h, lam=lam_h, lam6=0.0, mu=mu_h, nu=0.0, Z=eps, A=1.0, B=0.0, E=1.0,
            lam_p=eps ** 2 * lam_h, lam_pp=eps ** 4 * lam_h, mu_p=eps ** 2 * mu_h,
            mu_J0=eps ** -0.5, mu_J1=eps ** 1.5, Z_J0=0.0, E_J0=0.0, E_J1=0.0,
            x=params.lam, y=0.0,
        )
    raise DomainError(f"Flows are defined for d in (2, 3), got d={params.d}")


def beta_table(gamma: float, profile_kind: str = "sharp", limit: bool = False) -> Dict[int, float]:
    """β̃₀..β̃₃ by quadrature, or their common γ → 1 limit 1/π²."""
    if limit:
        return {n: 1.0 / math.pi ** 2 for n in range(4)}
    return {n: beta_tilde_2d(n, gamma, profile_kind) for n in range(4)}


# --- two dimensions -------------------------------------------------------------

def _x_bracket(z: float, betas: Betas) -> float:
    return 4.0 * betas[2] - 3.0 * betas[1] * z + 2.25 * betas[0] * z ** 2


def _y_bracket(z: float, betas: Betas) -> float:
    return 8.0 * betas[3] - 12.0 * betas[2] * z + 3.375 * betas[0] * z ** 3


def flow2d_step(x: float, y: float, gamma: float, betas: Betas,
                printed_sign: bool = False) -> Tuple[float, float]:
    """
    One step h → h-1 of the one-loop (x, y) recursion:
    x′ = γx - (γ-1)x²[4β̃₂ - 3β̃₁z + (9/4)β̃₀z²],
    y′ = y + (1-γ⁻¹)x³[8β̃₃ - 12β̃₂z + (27/8)β̃₀z³], z = y/x².

    With printed_sign the y increment enters with a minus sign.
    """
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    z = y / x ** 2
    x_new = gamma * x - (gamma - 1.0) * x ** 2 * _x_bracket(z, betas)
    increment = (1.0 - 1.0 / gamma) * x ** 3 * _y_bracket(z, betas)
    y_new = y - increment if printed_sign else y + increment
    return x_new, y_new


def flow2d_recursion(x0: float, y0: float, gamma: float, betas: Betas, steps: int,
                     lam: Optional[float] = None, h_start: int = 0,
                     printed_sign: bool = False) -> FlowTrajectory:
    """
    Iterate flow2d_step from (x0, y0) at scale h_start.

    When lam is given the states also carry λ_h = x/(16λ) and λ₆,h = y/(16λ),
    so that x = λ starts from the crossover value λ_h̄ = 1/16.
    """
    if steps < 0:
        raise DomainError(f"steps must be non-negative, got {steps}")
    x, y = x0, y0
    states = []
    for i in range(steps + 1):
        state = CouplingState(h=h_start - i, x=x, y=y)
        if lam:
            state.lam = x / (16.0 * lam)
            state.lam6 = y / (16.0 * lam)
        states.append(state)
        if i < steps:
            x, y = flow2d_step(x, y, gamma, betas, printed_sign)
    return FlowTrajectory(states, {"method": "recursion", "gamma": gamma, "d": 2})


def _ode_rhs(x: float, y: float, betas: Betas) -> Tuple[float, float]:
    z = y / x ** 2
    return x - x ** 2 * _x_bracket(z, betas), x ** 3 * _y_bracket(z, betas)


def _rk4(x: float, y: float, step: float, n_steps: int, betas: Betas, record_every: int = 0):
    samples = []
    for i in range(n_steps):
        if record_every and i % record_every == 0:
            samples.append((i * step, x, y))
        k1 = _ode_rhs(x, y, betas)
        k2 = _ode_rhs(x + 0.5 * step * k1[0], y + 0.5 * step * k1[1], betas)
        k3 = _ode_rhs(x + 0.5 * step * k2[0], y + 0.5 * step * k2[1], betas)
        k4 = _ode_rhs(x + step * k3[0], y + step * k3[1], betas)
        x += step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y += step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    if record_every:
        samples.append((n_steps * step, x, y))
    return x, y, samples


def flow2d_ode(x0: float, y0: float, t_max: float = 40.0, step: float = 1e-3,
               betas: Optional[Betas] = None, record_every: int = 100,
               halving_tol: float = 1e-6) -> FlowTrajectory:
    """
    Fixed-step RK4 solution of ẋ = x - x²[4β̃₂ - 3β̃₁z + (9/4)β̃₀z²],
    ẏ = x³[8β̃₃ - 12β̃₂z + (27/8)β̃₀z³]; with the limit betas this is the
    γ → 1 form π²ẋ = π²x - x²[4 - 3z + (9/4)z²], π²ẏ = x³[8 - 12z + (27/8)z³].

    The endpoint is recomputed with half the step; a relative difference above
    halving_tol raises ConvergenceError.
    """
    if not x0 > 0 or y0 < 0:
        raise DomainError(f"Need x0 > 0 and y0 >= 0, got ({x0}, {y0})")
    if not 0 < step <= 1e-3:
        raise DomainError(f"step must lie in (0, 1e-3], got {step}")
    betas = betas or beta_table(1.0, limit=True)
    n_steps = int(round(t_max / step))
    x, y, samples = _rk4(x0, y0, step, n_steps, betas, record_every)
    x_half, y_half, _ = _rk4(x0, y0, step / 2.0, 2 * n_steps, betas)
    drift = max(abs(x - x_half) / abs(x_half), abs(y - y_half) / max(abs(y_half), 1e-300))
    if not math.isfinite(drift) or drift > halving_tol:
        raise ConvergenceError(f"RK4 step halving changed the endpoint by {drift:.3e}")
    logger.debug(f"flow2d_ode: {n_steps} steps, halving drift {drift:.2e}")
    states = [CouplingState(h=-i, x=xs, y=ys, t=ts) for i, (ts, xs, ys) in enumerate(samples)]
    return FlowTrajectory(states, {"method": "ode", "step": step, "d": 2, "halving_drift": drift})


def stationary_z(betas: Betas) -> float:
    """Smallest positive root of 8β̃₃ - 12β̃₂z + (27/8)β̃₀z³."""
    roots = np.roots([3.375 * betas[0], 0.0, -12.0 * betas[2], 8.0 * betas[3]])
    positive = sorted(r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0)
    if not positive:
        raise ConvergenceError("The y-bracket has no positive root")
    return positive[0]


def _newton_fixed_point(x: float, z: float, betas: Betas, tol: float = 1e-13, max_iter: int = 100):
    """Damped Newton on 1 - x·B_x(z) = 0, B_y(z) = 0."""

    def residual(xv: float, zv: float) -> np.ndarray:
        return np.array([1.0 - xv * _x_bracket(zv, betas), _y_bracket(zv, betas)])

    current = residual(x, z)
    for iteration in range(max_iter):
        if np.max(np.abs(current)) < tol:
            return x, z, iteration
        dbx = -3.0 * betas[1] + 4.5 * betas[0] * z
        dby = -12.0 * betas[2] + 10.125 * betas[0] * z ** 2
        jac = np.array([[-_x_bracket(z, betas), -x * dbx], [0.0, dby]])
        delta = np.linalg.solve(jac, -current)
        damping = 1.0
        while damping > 1e-6:
            trial = residual(x + damping * delta[0], z + damping * delta[1])
            if np.max(np.abs(trial)) < np.max(np.abs(current)):
                break
            damping /= 2.0
        x, z = x + damping * delta[0], z + damping * delta[1]
        current = residual(x, z)
    if np.max(np.abs(current)) < tol:
        return x, z, max_iter
    raise ConvergenceError(f"Damped Newton did not converge (residual {np.max(np.abs(current)):.3e})")


def fixed_point_2d(betas: Optional[Betas] = None, mode: str = "ode", x0: float = 0.05,
                   gamma: Optional[float] = None, steps: int = 2000, t_max: float = 40.0) -> Dict[str, object]:
    """
    Joint stationary point of the (x, y) flow, reached from (x0, 0).

    The flow is integrated to its endpoint (recursion needs gamma) and the
    endpoint is refined by damped Newton. The report also carries the values
    obtained from the quadratic stationarity condition 8 - 12z + (27/8)z² = 0.
    """
    if mode not in FIXED_POINT_MODES:
        raise DomainError(f"mode must be one of {FIXED_POINT_MODES}, got '{mode}'")
    betas = betas or beta_table(1.0, limit=True)
    if mode == "recursion":
        if gamma is None:
            raise DomainError("The recursion mode needs gamma")
        traj = flow2d_recursion(x0, 0.0, gamma, betas, steps)
    else:
        traj = flow2d_ode(x0, 0.0, t_max=t_max, betas=betas, record_every=1000)
    end = traj.last
    z_end = end.y / end.x ** 2
    x_star, z_star, iterations = _newton_fixed_point(end.x, z_end, betas)
    if abs(z_star - stationary_z(betas)) > 1e-8:
        logger.warning(f"Newton reached z={z_star:.6f}, not the smallest positive stationary root")
    logger.info(f"2d fixed point ({mode}): x*={x_star:.8f}, z*={z_star:.8f} after {iterations} Newton steps")
    return {
        "mode": mode,
        "x_star": x_star,
        "z_star": z_star,
        "y_star": z_star * x_star ** 2,
        "endpoint_x": end.x,
        "endpoint_y": end.y,
        "x_star_without_sextic": 1.0 / (4.0 * betas[2]),
        "quadratic_z_roots": list(QUADRATIC_Z_ROOTS),
        "quadratic_x_star": QUADRATIC_X_STAR,
        "unnormalised_x_star_without_sextic": X_STAR_WITHOUT_SEXTIC,
        "notes": "x_star/z_star solve the implemented cubic system; quadratic_* values come from the "
                 "quadratic stationarity condition without the 1/pi^2 normalisation",
    }


# --- three dimensions -------------------------------------------------------------

def flow3d_Z(params: ModelParams, steps: int = 100, beta2: Optional[float] = None) -> FlowTrajectory:
    """
    Z_{h-1} = Z_h - (1/8)λε^{-1/2}β₂Z_h² from Z_h̄ = ε, for the given number of steps.

    λ_h and μ_h follow from the global WIs 16λ_h = 2√2μ_h = Z_h.
    """
    if params.d != 3:
        raise DomainError(f"flow3d_Z needs d=3, got d={params.d}")
    eps = epsilon(params)
    beta2 = beta2_3d(params.gamma, params.cutoff) if beta2 is None else beta2
    rate = params.lam * eps ** -0.5 * beta2 / 8.0
    start = initial_couplings_at_hbar(params)
    Z = eps
    states = []
    for i in range(steps + 1):
        states.append(replace(start, h=start.h - i, Z=Z, lam=Z / 16.0, mu=Z / (2.0 * SQRT2)))
        Z = Z - rate * Z ** 2
    traj = FlowTrajectory(states, {"method": "recursion", "gamma": params.gamma, "d": 3, "beta2": beta2,
                                   "hbar": start.h})
    logger.info(f"3d Z flow: Z from {eps:.4e} to {traj.last.Z:.4e} over {steps} scales")
    return traj


def Z_closed_form(params: ModelParams, depth, beta2: Optional[float] = None):
    """ε/(1 + (λε^{1/2}β₂/8)|h - h̄|)."""
    eps = epsilon(params)
    beta2 = beta2_3d(params.gamma, params.cutoff) if beta2 is None else beta2
    return eps / (1.0 + params.lam * math.sqrt(eps) * beta2 / 8.0 * np.abs(depth))


# --- chemical potential counterterm ---------------------------------------------

NuHook = Callable[[int, Mapping[int, float]], float]


def nu_map(beta_nu: NuHook, nu: Mapping[int, float], h_star: int, h_bar: int, gamma: float) -> Dict[int, float]:
    """
    (Tν)_h = -Σ_{j≤h} γ^{2(j-h-1)} β^ν_j on the window [h*, h̄]; scales below h*
    repeat β^ν_{h*}, which adds β_{h*}γ^{2(h*-h-1)}/(γ²-1).
    """
    betas = {j: beta_nu(j, nu) for j in range(h_star, h_bar + 1)}
    result = {}
    for h in range(h_star, h_bar + 1):
        total = sum(gamma ** (2 * (j - h - 1)) * betas[j] for j in range(h_star, h + 1))
        total += betas[h_star] * gamma ** (2 * (h_star - h - 1)) / (gamma ** 2 - 1.0)
        result[h] = -total
    return result


def nu_fixed_point(beta_nu: NuHook, params: ModelParams, window: Tuple[int, int],
                   tol: float = 1e-12, max_iter: int = 200) -> Dict[str, object]:
    """
    Banach iteration of the counterterm map from ν ≡ 0.

    Raises:
        NonContractionError: if an empirical contraction ratio reaches 1
        ConvergenceError: if the sup-norm change stays above tol
    """
    h_star, h_bar = window
    if h_star > h_bar:
        raise DomainError(f"Empty window [{h_star}, {h_bar}]")
    gamma = params.gamma
    nu = {h: 0.0 for h in range(h_star, h_bar + 1)}
    previous_change = None
    ratio = 0.0
    for iteration in range(1, max_iter + 1):
        updated = nu_map(beta_nu, nu, h_star, h_bar, gamma)
        change = max(abs(updated[h] - nu[h]) for h in nu)
        if previous_change:
            ratio = max(ratio, change / previous_change)
            if ratio >= 1.0:
                raise NonContractionError(f"Counterterm map is not a contraction (L={ratio:.3f})", ratio)
        nu = updated
        if change < tol:
            logger.info(f"nu fixed point after {iteration} iterations, L={ratio:.3e}")
            return {"nu": nu, "iterations": iteration, "contraction_ratio": ratio,
                    "sup_norm": max(abs(v) for v in nu.values())}
        previous_change = change
    raise ConvergenceError(f"nu iteration did not converge in {max_iter} iterations")


def oneloop_nu_hook(traj: FlowTrajectory, params: ModelParams, beta2: Optional[float] = None,
                    c1: Optional[float] = None, c2: Optional[float] = None) -> NuHook:
    """β^ν_j = λε^{-1/2}β₂[-c₁ℓ_j² + c₂ℓ_jν_j] with ℓ_j = Z_j/ε from a 3d trajectory."""
    eps = epsilon(params)
    beta2 = traj.meta.get("beta2", beta2_3d(params.gamma, params.cutoff)) if beta2 is None else beta2
    c1 = config.NU_HOOK_C1 if c1 is None else c1
    c2 = config.NU_HOOK_C2 if c2 is None else c2
    strength = params.lam * eps ** -0.5 * beta2
    ell = {s.h: s.Z / eps for s in traj.states}

    def hook(j: int, nu: Mapping[int, float]) -> float:
        return strength * (-c1 * ell[j] ** 2 + c2 * ell[j] * nu[j])

    return hook


# --- Ward-identity constrained couplings ------------------------------------------

def global_wi_couplings(traj: FlowTrajectory, d: int) -> FlowTrajectory:
    """
    Fill couplings fixed by the global WIs.

    3d: μ_h = 4√2λ_h and Z_h = 2√2μ_h. 2d: Z_h = 16γ^hλ_h, μ_h = 4√2γ^{h/2}λ_h,
    ω_h = 6√2γ^{h/2}λ₆,h, λ′_h = 24γ^hλ₆,h, μ′_h = 16√2γ^{3h/2}λ₆,h.
    """
    gamma = traj.meta.get("gamma")
    states = []
    for s in traj.states:
        if d == 3:
            lam_h = s.lam if math.isfinite(s.lam) else s.Z / 16.0
            mu_h = 4.0 * SQRT2 * lam_h
            states.append(replace(s, lam=lam_h, mu=mu_h, Z=2.0 * SQRT2 * mu_h))
        elif d == 2:
            if gamma is None:
                raise DomainError("2d global WIs need the trajectory's gamma")
            g = gamma ** s.h
            states.append(replace(
                s,
                Z=16.0 * g * s.lam,
                mu=4.0 * SQRT2 * math.sqrt(g) * s.lam,
                omega=6.0 * SQRT2 * math.sqrt(g) * s.lam6,
                lam_p=24.0 * g * s.lam6,
                mu_p=16.0 * SQRT2 * g ** 1.5 * s.lam6,
            ))
        else:
            raise DomainError(f"Global WIs are defined for d in (2, 3), got d={d}")
    return traj.with_states(states, global_wis=True)


def _extrapolated_E(states: Sequence[CouplingState]) -> float:
    """h → -∞ limit of E_h: 1/E_h extrapolated linearly in the depth, so a growing 1/E sends E to 0."""
    last = states[-1]
    if len(states) < 2 or last.E <= 0.0:
        return max(last.E, 0.0)
    slope = 1.0 / last.E - 1.0 / states[-2].E
    return 0.0 if slope > 0.0 else last.E


def wave_functions_from_WIs(traj: FlowTrajectory, params: ModelParams,
                            variant: str = "propWI") -> Tuple[FlowTrajectory, Dict[str, float]]:
    """
    E_h = ε⁻¹Z_h, A_h = 1 and B_h from the selected WI variant:
    propWI solves E² + ZB = Zε⁻¹, i.e. B = ε⁻¹(1-E); Bh_complete uses
    √2B = ε⁻¹(1-E).

    The sound speed c² = c_B²A/(εB) uses A at the last scale and B at the
    extrapolated limit of E along the trajectory; A/B is measured in units
    where ε corresponds to c_B². A trajectory whose E does not flow to zero
    leaves B_{-∞} at zero and c² infinite.
    """
    if variant not in B_VARIANTS:
        raise DomainError(f"variant must be one of {B_VARIANTS}, got '{variant}'")
    if not traj.states:
        raise DomainError("Empty trajectory")
    eps = epsilon(params)
    divisor = 1.0 if variant == "propWI" else SQRT2
    states = []
    for s in traj.states:
        E = s.Z / eps
        states.append(replace(s, E=E, A=1.0, B=(1.0 - E) / (eps * divisor)))
    last = states[-1]
    E_inf = _extrapolated_E(states)
    A_inf = last.A
    B_inf = (1.0 - E_inf) / (eps * divisor)
    c_b_squared = 2.0 * params.lam * params.rho0 * params.vhat0
    if B_inf > 0:
        c_squared = c_b_squared * A_inf / (eps * B_inf)
    else:
        logger.warning(f"E does not flow to zero (E_inf={E_inf:.4e}); the sound speed diverges")
        c_squared = math.inf
    summary = {
        "E_inf": E_inf,
        "A_inf": A_inf,
        "B_inf": B_inf,
        "c_squared": c_squared,
        "c_B_squared": c_b_squared,
        "correction": c_squared / c_b_squared - 1.0,
    }
    if last.B > 0:
        summary["c_squared_last_scale"] = c_b_squared * last.A / (eps * last.B)
    return traj.with_states(states, b_variant=variant), summary


def source_couplings(traj: FlowTrajectory, d: int) -> FlowTrajectory:
    """
    Couplings with external sources, seeded on the first scale by the local WIs

        2γ^{(3-d)h/2}μ^{J0} = E, E^{J0} = -√2B, J = B, E^{J1} = √2(1-A), K = 2(A-1)

    and then run with their own leading-order recursions. These follow the μ,
    E and Z flows through r_h = μ^{J0}_h/μ_h:

        μ^{J0}_{h-1} = μ^{J0}_h + r_h(μ_{h-1} - μ_h)
        E^{J0}_{h-1} = E^{J0}_h + r_h(E_{h-1} - E_h)
        J_{h-1} = J_h - (r_h²/2)(Z_{h-1} - Z_h)

    while E^{J1} and K keep their seeds. The local WIs on later scales are
    therefore consequences of the flow, checked by ward.local_WI_check.

    Raises:
        DomainError: if μ, Z, E, A or B are missing
    """
    if not traj.states:
        raise DomainError("Empty trajectory")
    for name in ("mu", "Z", "E", "A", "B"):
        if any(math.isnan(getattr(s, name)) for s in traj.states):
            raise DomainError(f"Source couplings need '{name}' on every scale")
    gamma = traj.meta["gamma"]
    first = traj.states[0]
    mu_J0 = first.E / (2.0 * gamma ** ((3 - d) * first.h / 2.0))
    E_J0 = -SQRT2 * first.B
    J = first.B
    E_J1 = SQRT2 * (1.0 - first.A)
    K = 2.0 * (first.A - 1.0)
    states = []
    prev = None
    for s in traj.states:
        if prev is not None:
            ratio = mu_J0 / prev.mu
            mu_J0 += ratio * (s.mu - prev.mu)
            E_J0 += ratio * (s.E - prev.E)
            J -= 0.5 * ratio ** 2 * (s.Z - prev.Z)
        states.append(replace(s, mu_J0=mu_J0, E_J0=E_J0, E_J1=E_J1, J=J, K=K))
        prev = s
    return traj.with_states(states, source_couplings=True)


def trajectory_2d(params: ModelParams, steps: int = 200, betas: Optional[Betas] = None) -> FlowTrajectory:
    """2d recursion from (x, y) = (λ, 0) at h̄ with every WI-fixed coupling filled in."""
    if params.d != 2:
        raise DomainError(f"trajectory_2d needs d=2, got d={params.d}")
    betas = betas or beta_table(params.gamma, params.cutoff)
    h_bar = floor_hbar_scale(params)
    traj = flow2d_recursion(params.lam, 0.0, params.gamma, betas, steps, lam=params.lam, h_start=h_bar)
    traj = global_wi_couplings(traj, 2)
    traj, _ = wave_functions_from_WIs(traj, params)
    return source_couplings(traj, 2)


def trajectory_3d(params: ModelParams, steps: int = 100, beta2: Optional[float] = None,
                  variant: str = "propWI") -> Tuple[FlowTrajectory, Dict[str, float]]:
    """3d Z flow with WI-fixed couplings, wave functions and source couplings."""
    traj = global_wi_couplings(flow3d_Z(params, steps, beta2), 3)
    traj, summary = wave_functions_from_WIs(traj, params, variant)
    return source_couplings(traj, 3), summary
