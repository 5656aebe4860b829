import numpy as np
import pytest

from kerf.forest import (
    ForestModel,
    forest_predict,
    leaf_boxes,
    leaf_index,
    pair_proximity,
    proximity,
    sample_forest,
    sample_tree,
    same_cell,
)
from kerf.kernels import centered_kernel, uniform_kernel

from oracles import centered_bruteforce


def _rng(seed=0):
    return np.random.default_rng(seed)


def test_depth_zero_tree_is_single_leaf():
    tree = sample_tree("centered", 0, 2, _rng())
    assert tree.n_leaves == 1
    assert tree.split_coordinate.size == 0
    lo, hi = leaf_boxes(tree)
    assert lo.tolist() == [[0.0, 0.0]] and hi.tolist() == [[1.0, 1.0]]


def test_centered_positions_are_dyadic_midpoints():
    tree = sample_tree("centered", 3, 2, _rng(1))
    assert tree.split_position[0] == 0.5
    # every split position is a dyadic rational strictly inside (0, 1)
    assert all(0.0 < p < 1.0 and (p * 8) == int(p * 8) for p in tree.split_position)


def test_uniform_leaf_widths_partition_unit_interval():
    tree = sample_tree("uniform", 2, 1, _rng(2))
    lo, hi = leaf_boxes(tree)
    widths = (hi - lo).ravel()
    order = np.argsort(lo.ravel())
    assert np.isclose(widths.sum(), 1.0)
    # contiguous half-open cells
    assert np.allclose(hi.ravel()[order][:-1], lo.ravel()[order][1:])


@pytest.mark.parametrize("variant", ["centered", "uniform"])
def test_leaf_partition_probes(variant):
    tree = sample_tree(variant, 4, 3, _rng(3))
    lo, hi = leaf_boxes(tree)
    probes = _rng(4).random((200, 3))
    idx = leaf_index(tree, probes)
    for p, leaf in zip(probes, idx):
        inside = np.all((lo < p) & (p <= hi), axis=1)
        assert inside.sum() == 1  # exactly one cell contains the probe
        assert inside[leaf]


def test_split_coordinate_frequencies():
    rng = _rng(5)
    counts = np.zeros(2)
    n = 10_000
    for _ in range(n):
        tree = sample_tree("centered", 1, 2, rng)
        counts[tree.split_coordinate[0]] += 1
    assert abs(counts[0] / n - 0.5) < 0.02


def test_same_cell_trivial_cases():
    tree = sample_tree("centered", 3, 2, _rng(6))
    assert same_cell(tree, [0.3, 0.7], [0.3, 0.7])
    k1 = sample_tree("centered", 1, 1, _rng(7))
    assert not same_cell(k1, [0.2], [0.8])


def test_forest_determinism_and_seed_sensitivity():
    f1 = sample_forest("uniform", 3, 2, 5, seed=42)
    f2 = sample_forest("uniform", 3, 2, 5, seed=42)
    f3 = sample_forest("uniform", 3, 2, 5, seed=43)
    for t1, t2 in zip(f1.trees, f2.trees):
        np.testing.assert_array_equal(t1.split_coordinate, t2.split_coordinate)
        np.testing.assert_array_equal(t1.split_position, t2.split_position)
    assert any(
        not np.array_equal(t1.split_position, t3.split_position)
        for t1, t3 in zip(f1.trees, f3.trees)
    )


def test_forest_model_validates():
    with pytest.raises(ValueError):
        sample_forest("centered", 2, 2, 0, seed=0)
    t = sample_tree("centered", 2, 2, _rng())
    with pytest.raises(ValueError):
        ForestModel("centered", 3, 2, 0, (t,))
    with pytest.raises(ValueError):
        sample_tree("cart", 2, 2, _rng())


def test_proximity_trivial():
    forest = sample_forest("centered", 2, 2, 1, seed=1)
    assert proximity(forest, [0.2, 0.2], [0.2, 0.2]) == 1.0
    p = proximity(forest, [0.2, 0.2], [0.9, 0.9])
    assert p in (0.0, 1.0)


def test_proximity_explicit_forest_tracks_kernel():
    forest = sample_forest("centered", 2, 2, 4000, seed=9)
    x, z = np.array([0.2, 0.2]), np.array([0.4, 0.4])
    p = proximity(forest, x, z)
    expected = centered_kernel(x, z, 2)
    assert abs(p - expected) < 4 * np.sqrt(expected * (1 - expected) / 4000)


@pytest.mark.parametrize(
    "variant,depth,dim", [("centered", 3, 1), ("centered", 2, 2), ("uniform", 2, 2)]
)
def test_pair_proximity_tracks_kernel(variant, depth, dim):
    rng = _rng(depth * 7 + dim)
    n_trees = 40_000
    for trial in range(3):
        if variant == "centered":
            x, z = rng.random(dim), rng.random(dim)
            expected = centered_kernel(x, z, depth)
        else:
            x, z = np.zeros(dim), rng.random(dim)
            expected = uniform_kernel(z, depth)
        p = pair_proximity(variant, x, z, depth, n_trees, seed=100 + trial)
        tol = 5 * np.sqrt(max(expected * (1 - expected), 1e-4) / n_trees)
        assert abs(p - expected) < tol


def test_pair_proximity_deterministic():
    x, z = np.array([0.1, 0.6]), np.array([0.2, 0.7])
    a = pair_proximity("uniform", x, z, 3, 5000, seed=0)
    b = pair_proximity("uniform", x, z, 3, 5000, seed=0)
    assert a == b


def test_forest_predict_constant_target():
    forest = sample_forest("centered", 2, 2, 20, seed=3)
    X = _rng(8).random((50, 2))
    y = np.full(50, 3.25)
    preds = forest_predict(forest, X, y, X[:5])
    # with 50 training points every leaf at a training query is non-empty
    np.testing.assert_allclose(preds, 3.25)


def test_forest_predict_depth_zero_is_global_mean():
    forest = sample_forest("uniform", 0, 1, 1, seed=0)
    X = _rng(9).random((10, 1))
    y = _rng(10).normal(size=10)
    np.testing.assert_allclose(forest_predict(forest, X, y, [[0.5]]), y.mean())


def test_forest_predict_single_training_point():
    forest = sample_forest("centered", 3, 2, 10, seed=4)
    x = np.array([[0.3, 0.3]])
    preds = forest_predict(forest, x, np.array([7.0]), x)
    assert preds[0] == 7.0


def test_forest_predict_empty_leaf_contributes_zero():
    # One tree of depth 1 on coordinate 1: train point on the left,
    # query on the right -> empty leaf -> contribution 0.
    tree = sample_tree("centered", 1, 1, _rng(11))
    forest = ForestModel("centered", 1, 1, 0, (tree,))
    preds = forest_predict(forest, [[0.1]], np.array([5.0]), [[0.9]])
    assert preds[0] == 0.0


def test_forest_predict_validates():
    forest = sample_forest("centered", 1, 1, 2, seed=0)
    with pytest.raises(ValueError):
        forest_predict(forest, np.empty((0, 1)), np.empty(0), [[0.5]])
