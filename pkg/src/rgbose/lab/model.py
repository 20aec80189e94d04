"""Model parameters, scale cutoffs and the multiscale decomposition."""

import math
import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Union

import numpy as np
from scipy.special import expit

from .errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

CUTOFF_KINDS = ("sharp", "smooth")
POTENTIALS = ("constant", "exponential")


@dataclass(frozen=True)
class CutoffProfile:
    """Scale cutoff χ with thresholds a = 2/(γ²+1) and b = 2γ²/(γ²+1).

    The sharp kind is the step at t = 1; the smooth kind is the C^∞ step
    χ(t) = ψ((b - t)/(b - a)).
    """
    kind: str = "smooth"
    gamma: float = 2.0

    def __post_init__(self):
        if self.kind not in CUTOFF_KINDS:
            raise DomainError(f"Unknown cutoff kind '{self.kind}', expected one of {CUTOFF_KINDS}")
        if not self.gamma > 1.0:
            raise DomainError(f"Scale ratio gamma must exceed 1, got {self.gamma}")

    @property
    def a(self) -> float:
        return 2.0 / (self.gamma ** 2 + 1.0)

    @property
    def b(self) -> float:
        return 2.0 * self.gamma ** 2 / (self.gamma ** 2 + 1.0)


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the model.

    `lam` is the interaction intensity λ (``lambda`` in JSON documents).
    """
    lam: float = 0.1
    rho0: float = 1.0
    R0: float = 1.0
    vhat0: float = 1.0
    d: int = 3
    gamma: float = 2.0
    cutoff: str = "smooth"

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError(f"lambda must be non-negative, got {self.lam}")
        if self.rho0 <= 0 or self.R0 <= 0 or self.vhat0 <= 0:
            raise DomainError("rho0, R0 and vhat0 must be positive")
        if self.d not in (1, 2, 3):
            raise DomainError(f"Unsupported dimension d={self.d}")
        CutoffProfile(self.cutoff, self.gamma)

    @property
    def profile(self) -> CutoffProfile:
        return CutoffProfile(self.cutoff, self.gamma)

    @property
    def epsilon(self) -> float:
        return epsilon(self)

    @property
    def kappa(self) -> float:
        return kappa(self)

    def with_updates(self, **changes: Any) -> "ModelParams":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelParams":
        """Build parameters from a JSON-style document."""
        cutoff = data.get("cutoff", {})
        kind = cutoff.get("kind", "smooth") if isinstance(cutoff, dict) else str(cutoff)
        return cls(
            lam=float(data.get("lambda", cls.lam)),
            rho0=float(data.get("rho0", cls.rho0)),
            R0=float(data.get("R0", cls.R0)),
            vhat0=float(data.get("vhat0", cls.vhat0)),
            d=int(data.get("d", cls.d)),
            gamma=float(data.get("gamma", cls.gamma)),
            cutoff=kind,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        data["cutoff"] = {"kind": data["cutoff"]}
        return data


def epsilon(params: ModelParams) -> float:
    """Adimensional Bogoliubov parameter ε = 2λρ₀v̂(0)R₀²."""
    return 2.0 * params.lam * params.rho0 * params.vhat0 * params.R0 ** 2


def kappa(params: ModelParams) -> float:
    """Order-counting parameter κ = λρ₀R₀^d used by the bound formulas."""
    return params.lam * params.rho0 * params.R0 ** params.d


def hbar_scale(params: ModelParams) -> float:
    """Crossover scale h̄ = log_γ ε.

    Raises:
        DomainError: if ε is not in (0, 1)
    """
    eps = epsilon(params)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"hbar_scale requires 0 < epsilon < 1, got epsilon={eps}")
    return math.log(eps) / math.log(params.gamma)


def floor_hbar_scale(params: ModelParams) -> int:
    """Integer crossover scale ⌊log_γ ε⌋."""
    return int(math.floor(hbar_scale(params) + 1e-12))


def smooth_step(s: ArrayLike) -> ArrayLike:
    """ψ(s) = e^{-1/s}/(e^{-1/s}+e^{-1/(1-s)}), clamped to 0 below 0 and 1 above 1."""
    s = np.asarray(s, dtype=float)
    inner = np.clip(s, 1e-300, 1.0 - 1e-16)
    with np.errstate(over="ignore", divide="ignore"):
        value = expit(1.0 / (1.0 - inner) - 1.0 / inner)
    value = np.where(s <= 0.0, 0.0, np.where(s >= 1.0, 1.0, value))
    return value if value.ndim else float(value)


def chi0(t: ArrayLike, profile: CutoffProfile) -> ArrayLike:
    """Single cutoff χ(t): 1 for t ≤ a, 0 for t ≥ b, monotone in between."""
    t = np.asarray(t, dtype=float)
    if profile.kind == "sharp":
        value = np.where(t <= 1.0, 1.0, 0.0)
    else:
        value = np.asarray(smooth_step((profile.b - t) / (profile.b - profile.a)))
    return value if value.ndim else float(value)


def chi_h(ksq: ArrayLike, h: int, profile: CutoffProfile) -> ArrayLike:
    """χ_h(k) = χ(γ^{-2h}|k|²)."""
    return chi0(np.asarray(ksq, dtype=float) * profile.gamma ** (-2 * h), profile)


def chi0_complement(t: ArrayLike, profile: CutoffProfile) -> ArrayLike:
    """1 - χ(t), evaluated without cancellation near t = a."""
    t = np.asarray(t, dtype=float)
    if profile.kind == "sharp":
        value = np.where(t <= 1.0, 0.0, 1.0)
    else:
        value = np.asarray(smooth_step((t - profile.a) / (profile.b - profile.a)))
    return value if value.ndim else float(value)


def f_h(ksq: ArrayLike, h: int, profile: CutoffProfile) -> ArrayLike:
    """Single-scale cutoff f_h = χ_h - χ_{h-1}, supported where |k|² ≈ γ^{2h}."""
    if profile.kind == "sharp":
        return chi_h(ksq, h, profile) - chi_h(ksq, h - 1, profile)
    x = np.asarray(ksq, dtype=float) * profile.gamma ** (-2 * h)
    # chi(x) = 1 below a, and chi(gamma^2 x) = 0 above it
    value = np.where(x <= profile.a, chi0_complement(profile.gamma ** 2 * x, profile), chi0(x, profile))
    return value if value.ndim else float(value)


def window_chi(ksq: ArrayLike, h_star: int, profile: CutoffProfile) -> ArrayLike:
    """Cutoff of the window [h*, 0]: χ(t) - χ(γ^{2-2h*} t) = Σ_{h*≤h≤0} f_h."""
    return chi_h(ksq, 0, profile) - chi_h(ksq, h_star - 1, profile)


def shell_indicator(t: ArrayLike, gamma: float) -> ArrayLike:
    """Indicator of the support window [aγ^{-2}, b] of f₀."""
    profile = CutoffProfile("sharp", gamma)
    t = np.asarray(t, dtype=float)
    value = np.where((t >= profile.a / gamma ** 2) & (t <= profile.b), 1.0, 0.0)
    return value if value.ndim else float(value)


def vhat(k: ArrayLike, params: ModelParams, potential: str = "constant") -> ArrayLike:
    """Fourier transform of the pair potential, normalised to v̂(0).

    Args:
        k: Momentum modulus |k|
        params: Model parameters
        potential: 'constant' (local approximation) or 'exponential' (e^{-|x|/R₀})

    Returns:
        v̂(k)
    """
    if potential not in POTENTIALS:
        raise DomainError(f"Unknown potential '{potential}', expected one of {POTENTIALS}")
    k = np.asarray(k, dtype=float)
    if potential == "constant":
        value = np.full_like(k, params.vhat0)
    else:
        value = params.vhat0 / (1.0 + (k * params.R0) ** 2) ** ((params.d + 1) / 2.0)
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class Momentum:
    """Energy-momentum k = (k₀, |k|); propagators depend on k only through |k|."""
    k0: float
    kvec_norm: float = 0.0

    @property
    def ksq(self) -> float:
        return self.kvec_norm ** 2

    @property
    def is_zero(self) -> bool:
        return self.k0 == 0.0 and self.kvec_norm == 0.0


def shifted_norm(k: ArrayLike, p: ArrayLike, cos_angle: ArrayLike = 1.0) -> ArrayLike:
    """|k + p| for spatial moduli k, p at relative angle arccos(cos_angle)."""
    return np.sqrt(np.maximum(k ** 2 + p ** 2 + 2.0 * k * p * cos_angle, 0.0))


def cutoff_argument(k0: ArrayLike, kvec_norm: ArrayLike) -> ArrayLike:
    """Argument k₀² + |k|⁴ of the scale cutoffs in the quadratic-dispersion region."""
    return np.asarray(k0) ** 2 + np.asarray(kvec_norm) ** 4
