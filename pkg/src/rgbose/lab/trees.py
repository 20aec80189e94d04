"""Gallavotti-Nicolò trees: shape enumeration and sums over scale labels."""

import math
import functools
import itertools
import logging
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import attr

from .. import config
from .errors import DomainError

logger = logging.getLogger(__name__)

# Open intervals of admissible short-memory exponents θ.
THETA_INTERVALS: Dict[str, Tuple[float, float]] = {
    "3d_below": (0.0, 2.0),
    "2d_below": (0.0, 0.5),
    "above": (0.0, 0.5),
}


def _canonical(children: Sequence["GNTree"]) -> str:
    if not children:
        return "o"
    return "(" + "".join(sorted(child.canonical for child in children)) + ")"


@attr.s(frozen=True, eq=False, repr=False)
class GNTree:
    """
    Unordered rooted tree whose internal nodes have at least two children.

    A node without children is an endpoint. Equality and hashing use the
    canonical string, so isomorphic shapes compare equal.
    """
    children: Tuple["GNTree", ...] = attr.ib(default=(), converter=tuple)
    canonical: str = attr.ib(init=False)
    num_leaves: int = attr.ib(init=False)

    def __attrs_post_init__(self):
        if len(self.children) == 1:
            raise DomainError("Internal nodes must have at least two children")
        object.__setattr__(self, "canonical", _canonical(self.children))
        leaves = 1 if not self.children else sum(c.num_leaves for c in self.children)
        object.__setattr__(self, "num_leaves", leaves)

    def __eq__(self, other):
        if not isinstance(other, GNTree):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __repr__(self):
        return f"GNTree({self.canonical})"

    def is_leaf(self) -> bool:
        return not self.children

    def internal_nodes(self) -> Iterator["GNTree"]:
        """Internal nodes in pre-order."""
        if self.children:
            yield self
            for child in self.children:
                yield from child.internal_nodes()

    @property
    def num_internal(self) -> int:
        return sum(1 for _ in self.internal_nodes())


def partitions(n: int, max_part: int = None) -> Iterator[Tuple[int, ...]]:
    """Integer partitions of n in non-increasing order."""
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def group_partition(part: Tuple[int, ...]) -> List[List[int]]:
    return [list(group) for _, group in itertools.groupby(part)]


@functools.lru_cache(maxsize=None)
def _shapes(n: int) -> Tuple[GNTree, ...]:
    if n == 1:
        return (GNTree(),)
    result = []
    for part in partitions(n):
        if len(part) < 2:
            continue
        for children in _child_pairings(group_partition(part)):
            result.append(GNTree(children))
    return tuple(result)


def _child_pairings(groups: List[List[int]]) -> Iterator[List[GNTree]]:
    if not groups:
        yield []
        return
    size = groups[0][0]
    for chosen in itertools.combinations_with_replacement(_shapes(size), len(groups[0])):
        for rest in _child_pairings(groups[1:]):
            yield list(chosen) + rest


def enumerate_unlabeled(n: int) -> List[GNTree]:
    """
    All series-reduced rooted shapes with n indistinct endpoints.

    Raises:
        DomainError: if n < 1 or n exceeds TREE_ENUMERATION_MAX
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if n > config.TREE_ENUMERATION_MAX:
        raise DomainError(f"Exhaustive enumeration is capped at n={config.TREE_ENUMERATION_MAX}, got {n}")
    trees = list(_shapes(n))
    logger.debug(f"enumerated {len(trees)} shapes with {n} endpoints")
    return trees


@functools.lru_cache(maxsize=None)
def count_series_reduced(n: int) -> int:
    """Number of shapes with n endpoints, by multiset counting over leaf partitions."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if n == 1:
        return 1
    total = 0
    for part in partitions(n):
        if len(part) < 2:
            continue
        ways = 1
        for group in group_partition(part):
            k = count_series_reduced(group[0])
            ways *= math.comb(k + len(group) - 1, len(group))
        total += ways
    return total


def labeled_scale_sum(tree: GNTree, h: int, a: float, gamma: float) -> float:
    """
    Σ over strictly increasing labels h < h_v ≤ 0 of ∏_v γ^{-a(h_v - h_v′)},
    v′ being the parent of v and the root carrying scale h.

    Computed by dynamic programming over the internal nodes.
    """
    if h >= 0:
        raise DomainError(f"Root scale must be negative, got h={h}")
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    factor = gamma ** -a

    @functools.lru_cache(maxsize=None)
    def below(node: GNTree, parent_scale: int) -> float:
        # Sum over the label of node given its parent's label.
        total = 0.0
        for scale in range(parent_scale + 1, 1):
            term = factor ** (scale - parent_scale)
            for child in node.children:
                if not child.is_leaf():
                    term *= below(child, scale)
            total += term
        return total

    if tree.is_leaf():
        return 1.0
    return below(tree, h)


def brute_force_scale_sum(tree: GNTree, h: int, a: float, gamma: float) -> float:
    """The same sum as labeled_scale_sum by explicit enumeration of every labelling."""
    # Shapes share subtree objects, so parents are tracked by position.
    nodes: List[GNTree] = []
    parent: Dict[int, int] = {}
    stack = [(tree, None)]
    while stack:
        node, parent_index = stack.pop()
        if node.is_leaf():
            continue
        index = len(nodes)
        nodes.append(node)
        if parent_index is not None:
            parent[index] = parent_index
        stack.extend((child, index) for child in node.children)
    if not nodes:
        return 1.0
    total = 0.0
    for labels in itertools.product(range(h + 1, 1), repeat=len(nodes)):
        parent_labels = [labels[parent[i]] if i in parent else h for i in range(len(nodes))]
        if any(labels[i] <= parent_labels[i] for i in range(len(nodes))):
            continue
        total += math.prod(gamma ** (-a * (labels[i] - parent_labels[i])) for i in range(len(nodes)))
    return total


def fit_tree_constant(trees: Iterable[GNTree], gamma: float, a: float,
                      h_range: Iterable[int] = range(-1, -31, -1)) -> Dict[str, object]:
    """
    Fit C with sup_h labeled_scale_sum(τ, h) ≤ C^n over the given trees.

    Returns:
        {"C", "per_n": {n: largest sup over trees with n endpoints}}
    """
    h_values = list(h_range)
    per_n: Dict[int, float] = {}
    for tree in trees:
        sup = max(labeled_scale_sum(tree, h, a, gamma) for h in h_values)
        per_n[tree.num_leaves] = max(per_n.get(tree.num_leaves, 0.0), sup)
    fitted = max(value ** (1.0 / n) for n, value in per_n.items())
    logger.info(f"labeled-tree constant C={fitted:.6f} (gamma={gamma}, a={a})")
    return {"C": fitted, "per_n": per_n}


def admissible_theta_interval(regime: str) -> Tuple[float, float]:
    try:
        return THETA_INTERVALS[regime]
    except KeyError:
        raise DomainError(f"Unknown regime '{regime}', expected one of {tuple(THETA_INTERVALS)}")


def short_memory_factor(path_depth: int, theta: float, gamma: float, regime: str = "3d_below") -> float:
    """
    Suppression γ^{-θ·depth} extracted along a path of the given depth.

    Raises:
        DomainError: if θ lies outside the open interval admissible in the regime
    """
    if path_depth < 0:
        raise DomainError(f"path_depth must be non-negative, got {path_depth}")
    low, high = admissible_theta_interval(regime)
    if not low < theta < high:
        raise DomainError(f"theta={theta} outside the admissible interval ({low}, {high}) for {regime}")
    return gamma ** (-theta * path_depth)
