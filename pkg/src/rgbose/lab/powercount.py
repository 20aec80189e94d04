"""
Power counting of multiscale kernels.

All dimensions are exact rationals. A kernel is identified by its external
legs (n_l dashed, n_t plain), its external derivative decorations and its
external source legs; a diagram additionally by the counts of each vertex
type it contains.
"""

import logging
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .errors import DomainError

logger = logging.getLogger(__name__)

ABOVE = "above_hbar"
BELOW = "below_hbar"
REGIONS = (ABOVE, BELOW)
AT_SCALES = ("hbar", "asymptotic")

HALF = Fraction(1, 2)

# Source-leg dimensions (J0, J1) above the crossover scale.
SOURCE_DIMENSIONS_ABOVE = (Fraction(1), HALF)

# (n_l, n_t) of the local part that vanishes by parity.
PARITY_VANISHING = frozenset({(0, 1), (1, 1), (2, 1), (0, 3), (3, 1), (1, 3), (4, 1), (2, 3), (0, 5)})

# Dashed/plain legs carried by each vertex type.
VERTEX_LEGS = {
    "m2": (0, 2),
    "m3": (1, 2),
    "m3p": (3, 0),
    "m4": (0, 4),
    "m4p": (2, 2),
    "m4pp": (4, 0),
    "m5": (1, 4),
    "m6": (0, 6),
}

_Z_ABOVE = {
    3: {2: 2, 3: 1},
    2: {2: 2, 3: 1, 4: 1},
}

_Z_BELOW = {
    3: {(0, 2): 4, (0, 3): 3, (1, 1): 3, (0, 4): 2, (1, 2): 2, (2, 0): 2},
    2: {
        (0, 2): 4,
        (0, 5): 3, (0, 3): 3, (1, 1): 3,
        (0, 6): 2, (0, 4): 2, (1, 2): 2, (2, 0): 2,
        (1, 3): 1,
    },
}

# Dimension carried by each endpoint vertex, i.e. the scaling factor absorbed
# by the definition of the corresponding running coupling.
ENDPOINT_DIMENSIONS_BELOW = {
    3: {"m2": -2, "m3": 0, "m3p": 2, "m4": 0, "m4p": 2, "m4pp": 4, "m5": 2, "m6": 2},
    2: {"m2": -2, "m3": -HALF, "m3p": Fraction(3, 2), "m4": -1, "m4p": 1, "m4pp": 3, "m5": HALF, "m6": 0},
}


def _q(value) -> Fraction:
    return Fraction(value)


# Printed relevance figures, keyed by (n_l, n_t).
FIGURE_TABLES: Dict[str, Dict[str, object]] = {
    "rel3d_above": {
        "d": 3, "region": ABOVE, "quantity": "delta",
        "values": {(1, 2): _q("1/4"), (3, 0): _q("1/4"), (0, 2): _q(1), (2, 0): _q(1),
                   (0, 3): _q("1/4"), (2, 1): _q("1/4"), (1, 1): _q(1)},
    },
    "rel3d_below": {
        "d": 3, "region": BELOW, "quantity": "delta",
        "values": {(0, 4): _q(0), (1, 2): _q(0), (0, 2): _q(2), (2, 0): _q(0), (0, 3): _q(1), (1, 1): _q(1)},
    },
    "rel2d_above": {
        "d": 2, "region": ABOVE, "quantity": "delta",
        "values": {(0, 4): _q(0), (2, 2): _q(0), (4, 0): _q(0), (1, 3): _q(0), (3, 1): _q(0),
                   (1, 2): HALF, (3, 0): HALF, (0, 3): HALF, (2, 1): HALF,
                   (0, 2): _q(1), (2, 0): _q(1), (1, 1): _q(1)},
    },
    "rel2d_below": {
        "d": 2, "region": BELOW, "quantity": "delta",
        "values": {(0, 6): _q(0), (0, 4): _q(1), (1, 2): HALF, (0, 2): _q(2), (2, 0): _q(0),
                   (0, 5): HALF, (1, 3): _q(0), (0, 3): _q("3/2"), (1, 1): _q(1)},
    },
    "effective_2d": {
        "d": 2, "region": BELOW, "quantity": "D_hat",
        "values": {(1, 3): _q("-1/2"), (1, 2): _q(-1), (2, 0): _q(-1), (1, 1): _q("-3/2"),
                   (1, 4): _q(0), (2, 2): _q(0), (3, 0): _q(0)},
    },
}

# Printed entries that disagree with the formulas they illustrate.
FIGURE_MISPRINTS: Dict[str, Dict[Tuple[int, int], Fraction]] = {
    "effective_2d": {(2, 1): _q("-1/2")},
}


@dataclass(frozen=True)
class DiagramExternals:
    """External legs of a kernel."""
    n_l: int = 0
    n_t: int = 0
    n_d0: int = 0
    n_dx: int = 0
    n_J0: int = 0
    n_J1: int = 0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise DomainError(f"{f.name} must be non-negative")

    @property
    def n(self) -> int:
        return self.n_l + self.n_t

    @property
    def n_derivatives(self) -> int:
        return self.n_d0 + self.n_dx

    @property
    def is_bare(self) -> bool:
        return self.n_derivatives == 0 and self.n_J0 == 0 and self.n_J1 == 0

    @property
    def legs(self) -> Tuple[int, int]:
        return (self.n_l, self.n_t)


@dataclass(frozen=True)
class VertexCounts:
    """Number of ν, μ, μ′, λ, λ′, λ″, ω and λ₆ vertices in a diagram."""
    m2: int = 0
    m3: int = 0
    m3p: int = 0
    m4: int = 0
    m4p: int = 0
    m4pp: int = 0
    m5: int = 0
    m6: int = 0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise DomainError(f"{f.name} must be non-negative")

    def as_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def total(self) -> int:
        return sum(self.as_dict().values())

    def half_lines(self) -> Tuple[int, int]:
        """Total dashed and plain half-lines carried by the vertices."""
        n_l = sum(count * VERTEX_LEGS[name][0] for name, count in self.as_dict().items())
        n_t = sum(count * VERTEX_LEGS[name][1] for name, count in self.as_dict().items())
        return n_l, n_t


@dataclass(frozen=True)
class Regime:
    d: int
    region: str

    def __post_init__(self):
        if self.d not in (2, 3):
            raise DomainError(f"Power counting supports d in (2, 3), got d={self.d}")
        if self.region not in REGIONS:
            raise DomainError(f"Unknown region '{self.region}', expected one of {REGIONS}")

    @property
    def below(self) -> bool:
        return self.region == BELOW


@dataclass(frozen=True)
class OrderFactor:
    """Exponents of λ, ε, γ^h, |h*-h̄| and of λ₆/(ελ²) in the size of a diagram."""
    pow_lambda: Fraction
    pow_eps: Fraction
    pow_gamma_h: Fraction = Fraction(0)
    pow_logterm: Fraction = Fraction(0)
    pow_c6: Fraction = Fraction(0)


def source_dimensions(regime: Regime) -> Tuple[Fraction, Fraction]:
    """Dimensions (ε₀, ε₁) assigned to the J₀ and J₁ source legs."""
    if regime.below:
        value = Fraction(regime.d + 1, 2)
        return value, value
    return SOURCE_DIMENSIONS_ABOVE


def _leg_dimensions(regime: Regime) -> Tuple[Fraction, Fraction]:
    d = regime.d
    if regime.below:
        return Fraction(d + 1, 2), Fraction(d - 1, 2)
    return Fraction(d, 4), Fraction(d, 4)


def _derivative_dimensions(regime: Regime) -> Tuple[Fraction, Fraction]:
    return (Fraction(1), Fraction(1)) if regime.below else (Fraction(1), HALF)


def _integration_dimension(regime: Regime) -> Fraction:
    return Fraction(regime.d + 1) if regime.below else Fraction(regime.d, 2) + 1


def _decorations(ext: DiagramExternals, regime: Regime) -> Fraction:
    e0, e1 = source_dimensions(regime)
    p0, px = _derivative_dimensions(regime)
    return p0 * ext.n_d0 + px * ext.n_dx + e0 * ext.n_J0 + e1 * ext.n_J1


def scaling_dimension(ext: DiagramExternals, regime: Regime) -> Fraction:
    """
    Scaling dimension δ of a kernel from its external legs.

    Below h̄ a dashed leg counts (d+1)/2 and a plain leg (d-1)/2; above h̄
    both count d/4. Derivatives and source legs lower δ by their dimensions.
    """
    dim_l, dim_t = _leg_dimensions(regime)
    return _integration_dimension(regime) - dim_l * ext.n_l - dim_t * ext.n_t - _decorations(ext, regime)


def z_improvement(ext: DiagramExternals, regime: Regime) -> int:
    """Gain in scaling dimension from renormalization; zero for decorated kernels."""
    if not ext.is_bare:
        return 0
    if regime.below:
        return _Z_BELOW[regime.d].get(ext.legs, 0)
    return _Z_ABOVE[regime.d].get(ext.n, 0)


@dataclass(frozen=True)
class EffectiveDimension:
    delta_hat: Fraction
    D_hat: Fraction


def effective_dimension_2d(ext: DiagramExternals) -> EffectiveDimension:
    """δ̂ = 3 - n_l - n_t/2 - n_∂ (each dashed leg raised by 1/2) and D̂ = δ̂ - z."""
    regime = Regime(2, BELOW)
    delta_hat = Fraction(3) - ext.n_l - HALF * ext.n_t - _decorations(ext, regime)
    return EffectiveDimension(delta_hat, delta_hat - z_improvement(ext, regime))


def _check_balance(vc: VertexCounts, ext: DiagramExternals, regime: Regime) -> int:
    allowed_high = regime.d == 2 and regime.below
    if not allowed_high and (vc.m5 or vc.m6):
        raise DomainError("ω and λ₆ vertices only appear in two dimensions below h̄")
    legs = sum(vc.half_lines())
    internal = legs - ext.n
    if internal < 0 or internal % 2:
        raise DomainError(f"Inconsistent leg balance: {legs} vertex half-lines, {ext.n} external legs")
    return internal


def loop_number(vc: VertexCounts, ext: DiagramExternals, regime: Regime) -> int:
    """
    L = (number of propagators) - (number of vertices) + 1, i.e.
    m4 + m4′ + m4″ + (m3+m3′)/2 + 3m5/2 + 2m6 - (n_l+n_t)/2 + 1.

    Raises:
        DomainError: if the half-lines cannot pair up with the external legs
    """
    internal = _check_balance(vc, ext, regime)
    loops = internal // 2 - vc.total + 1
    if loops < 0:
        raise DomainError(f"Negative loop number for {vc} with {ext.n} external legs")
    return loops


def n_ll_bound(m3: int, n_l: int) -> int:
    """Largest number of ll propagators, ⌊(m3 - n_l)/2⌋ (never negative)."""
    return max(0, (m3 - n_l) // 2)


def order_factor(vc: VertexCounts, ext: DiagramExternals, regime: Regime, at_scale: str = "hbar",
                 n_ll: int = 0) -> OrderFactor:
    """
    Exponents of the small parameters in the value of a diagram.

    Above h̄ every vertex is taken at scale 0. Below h̄, ``hbar`` places every
    vertex at h̄ and ``asymptotic`` at a common scale h* ≪ h̄.

    Args:
        n_ll: number of ll propagators, bounded by n_ll_bound(m3, n_l)
    """
    if at_scale not in AT_SCALES:
        raise DomainError(f"at_scale must be one of {AT_SCALES}, got '{at_scale}'")
    if n_ll < 0 or n_ll > n_ll_bound(vc.m3, ext.n_l):
        raise DomainError(f"n_ll={n_ll} exceeds the bound {n_ll_bound(vc.m3, ext.n_l)}")
    loops = Fraction(loop_number(vc, ext, regime))
    n = Fraction(ext.n)
    n_l = Fraction(ext.n_l)
    n_t = Fraction(ext.n_t)

    if not regime.below:
        m4 = vc.m4 + vc.m4p + vc.m4pp
        m3 = vc.m3 + vc.m3p
        external = 1 - HALF * n
        return OrderFactor(external + m4 + vc.m2 + HALF * m3, -external + HALF * m3)

    if regime.d == 3:
        if at_scale == "hbar":
            return OrderFactor(
                loops,
                HALF * loops - 3 + 2 * n_l + n_t + HALF * ext.n_dx + Fraction(3, 2) * vc.m2,
            )
        trilinear = HALF * vc.m3 - n_ll
        return OrderFactor(
            1 - HALF * n - trilinear,
            Fraction(-5, 2) + Fraction(7, 4) * n_l + Fraction(3, 4) * n_t + HALF * ext.n_dx
            - HALF * trilinear + vc.m2,
            pow_logterm=-(loops - 1 + HALF * n) - trilinear,
        )

    eps_external = -2 + Fraction(3, 2) * n_l + HALF * n_t + HALF * ext.n_derivatives
    if at_scale == "hbar":
        return OrderFactor(loops + vc.m2 + vc.m6, eps_external + vc.m2)
    gamma_power = HALF * (vc.m3 + vc.m5 + 2 * vc.m4p + 3 * vc.m3p) - n_ll
    return OrderFactor(
        loops,
        eps_external + vc.m2 - gamma_power,
        pow_gamma_h=gamma_power,
        pow_c6=Fraction(vc.m6 + vc.m5 + vc.m4p + vc.m3p),
    )


def endpoint_dimension(vc: VertexCounts, regime: Regime) -> Fraction:
    """Total dimension moved onto the endpoints of a diagram."""
    if regime.below:
        table = ENDPOINT_DIMENSIONS_BELOW[regime.d]
        return sum((Fraction(table[name]) * count for name, count in vc.as_dict().items()), Fraction(0))
    d = regime.d
    return (
        (Fraction(d, 2) - 1) * (vc.m4 + vc.m4p + vc.m4pp)
        + (Fraction(d, 4) - 1) * (vc.m3 + vc.m3p)
        - vc.m2
        + (Fraction(3 * d, 4) - 1) * vc.m5
        + Fraction(d - 1) * vc.m6
    )


def vertex_sum_dimension(vc: VertexCounts, ext: DiagramExternals, regime: Regime) -> Fraction:
    """
    Dimension of a diagram counted line by line: every integration lowers it
    by the integration dimension and every contracted half-line adds its
    propagator dimension. Subtracting endpoint_dimension recovers
    scaling_dimension(ext).
    """
    _check_balance(vc, ext, regime)
    dim_l, dim_t = _leg_dimensions(regime)
    vertex_l, vertex_t = vc.half_lines()
    return (
        -_integration_dimension(regime) * (vc.total - 1)
        + dim_l * (vertex_l - ext.n_l)
        + dim_t * (vertex_t - ext.n_t)
        - _decorations(ext, regime)
    )


def classify(ext: DiagramExternals, regime: Regime) -> Dict[str, object]:
    """Relevance class of a kernel together with its dimensions and parity flag."""
    delta = scaling_dimension(ext, regime)
    if delta > 0:
        kind = "relevant"
    elif delta == 0:
        kind = "marginal"
    else:
        kind = "irrelevant"
    effective: Optional[Fraction] = None
    if regime.d == 2 and regime.below:
        effective = effective_dimension_2d(ext).delta_hat
    return {
        "kind": kind,
        "delta": delta,
        "z": z_improvement(ext, regime),
        "effective_delta": effective,
        "vanishes_by_parity": ext.is_bare and ext.legs in PARITY_VANISHING,
    }


def figure_value(name: str, legs: Tuple[int, int]) -> Fraction:
    """Value of a printed relevance figure entry recomputed from the formulas."""
    table = FIGURE_TABLES[name]
    ext = DiagramExternals(*legs)
    if table["quantity"] == "D_hat":
        return effective_dimension_2d(ext).D_hat
    return scaling_dimension(ext, Regime(table["d"], table["region"]))
