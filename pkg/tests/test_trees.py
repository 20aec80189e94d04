import pytest

from rgbose.lab.errors import DomainError
from rgbose.lab.trees import (
    GNTree,
    admissible_theta_interval,
    brute_force_scale_sum,
    count_series_reduced,
    enumerate_unlabeled,
    fit_tree_constant,
    labeled_scale_sum,
    partitions,
    short_memory_factor,
)

# Series-reduced rooted trees by number of leaves
SHAPE_COUNTS = [1, 1, 2, 5, 12, 33, 90, 261, 766]


def test_partitions():
    assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


@pytest.mark.parametrize("n,expected", list(enumerate(SHAPE_COUNTS, start=1)))
def test_count_series_reduced(n, expected):
    assert count_series_reduced(n) == expected


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_matches_count(n):
    trees = enumerate_unlabeled(n)
    assert len(trees) == count_series_reduced(n)
    assert len(set(trees)) == len(trees)
    assert all(tree.num_leaves == n for tree in trees)


def test_enumeration_limits():
    with pytest.raises(DomainError):
        enumerate_unlabeled(0)
    with pytest.raises(DomainError):
        enumerate_unlabeled(50)


def test_tree_shape_equality():
    leaf = GNTree()
    cherry = GNTree((leaf, leaf))
    assert GNTree((cherry, leaf)) == GNTree((leaf, cherry))
    assert GNTree((cherry, leaf)).num_internal == 2
    with pytest.raises(DomainError):
        GNTree((leaf,))


def test_star_scale_sum_is_geometric():
    star = GNTree((GNTree(), GNTree(), GNTree()))
    assert labeled_scale_sum(star, -4, 1.0, 2.0) == pytest.approx(15.0 / 16.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_labeled_sum_matches_brute_force(n):
    for tree in enumerate_unlabeled(n):
        assert labeled_scale_sum(tree, -4, 0.7, 2.0) == pytest.approx(brute_force_scale_sum(tree, -4, 0.7, 2.0))


def test_labeled_sum_rejects_bad_input():
    tree = enumerate_unlabeled(3)[0]
    with pytest.raises(DomainError):
        labeled_scale_sum(tree, 0, 1.0, 2.0)
    with pytest.raises(DomainError):
        labeled_scale_sum(tree, -3, 0.0, 2.0)


def test_fit_tree_constant_bounds_every_size():
    trees = [tree for n in range(1, 6) for tree in enumerate_unlabeled(n)]
    fit = fit_tree_constant(trees, gamma=2.0, a=1.0, h_range=range(-1, -16, -1))
    assert set(fit["per_n"]) == {1, 2, 3, 4, 5}
    assert fit["C"] >= 1.0
    for n, sup in fit["per_n"].items():
        assert sup <= fit["C"] ** n * (1 + 1e-12)


def test_short_memory_factor():
    assert short_memory_factor(3, 1.0, 2.0) == pytest.approx(1.0 / 8.0)
    assert admissible_theta_interval("2d_below") == (0.0, 0.5)
    with pytest.raises(DomainError):
        short_memory_factor(3, 1.0, 2.0, regime="2d_below")
    with pytest.raises(DomainError):
        short_memory_factor(-1, 0.1, 2.0)
    with pytest.raises(DomainError):
        admissible_theta_interval("sideways")
