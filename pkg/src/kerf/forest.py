"""Monte Carlo simulation of centered and uniform random forests.

Trees are depth-``k`` perfect binary trees over [0, 1]^d.  Every internal
node carries the split coordinate (i.i.d. uniform over coordinates) and the
split position: the midpoint of the current cell side for centered trees, a
uniform draw inside it for uniform trees.  A point goes left when its
coordinate is <= the split position, matching the half-open dyadic cells
used by the closed-form kernels.

Randomness is counter-based (Philox) with one substream per tree derived
from ``(seed, tree_index)``, so forests are reproducible regardless of how
tree sampling is scheduled.  ``ForestModel`` is immutable after
construction and safe to share across threads.

For pair-proximity workloads with many trees, :func:`pair_proximity` walks
both points down the (virtual) tree together, vectorized across trees,
without materializing any tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_depth, check_dim, check_unit_box, check_unit_point

__all__ = [
    "TreeDescription",
    "ForestModel",
    "sample_tree",
    "sample_forest",
    "leaf_index",
    "same_cell",
    "leaf_boxes",
    "proximity",
    "pair_proximity",
    "forest_predict",
]

VARIANTS = ("centered", "uniform")

# Explicit trees store 2^k - 1 nodes; beyond this depth use pair_proximity.
_MAX_EXPLICIT_DEPTH = 24


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def _tree_rng(seed, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


@dataclass(frozen=True)
class TreeDescription:
    """A sampled depth-``k`` tree, nodes in heap order (children of i at 2i+1, 2i+2)."""

    variant: str
    depth: int
    dim: int
    split_coordinate: np.ndarray  # (2^depth - 1,) int, values in [0, dim)
    split_position: np.ndarray  # (2^depth - 1,) float

    @property
    def n_leaves(self) -> int:
        return 1 << self.depth


@dataclass(frozen=True)
class ForestModel:
    """An immutable collection of i.i.d. trees sharing (variant, depth, dim)."""

    variant: str
    depth: int
    dim: int
    seed: int
    trees: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.trees) < 1:
            raise ValueError("a forest needs at least one tree")
        for t in self.trees:
            if (t.variant, t.depth, t.dim) != (self.variant, self.depth, self.dim):
                raise ValueError("all trees must share the forest's variant, depth and dim")

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def sample_tree(variant, depth, dim, rng) -> TreeDescription:
    """Sample one tree; ``rng`` is a ``numpy.random.Generator``."""
    variant = _check_variant(variant)
    depth = check_depth(depth)
    dim = check_dim(dim)
    if depth > _MAX_EXPLICIT_DEPTH:
        raise ValueError(
            f"explicit trees are limited to depth {_MAX_EXPLICIT_DEPTH} "
            f"(2^depth nodes); use pair_proximity for deeper walks"
        )
    n_nodes = (1 << depth) - 1
    coords = rng.integers(0, dim, size=n_nodes)
    positions = np.empty(n_nodes)
    # Level-order construction, carrying each level's cell bounds.
    lo = np.zeros((1, dim))
    hi = np.ones((1, dim))
    node = 0
    for _ in range(depth):
        width = lo.shape[0]
        j = coords[node : node + width]
        rows = np.arange(width)
        a = lo[rows, j]
        b = hi[rows, j]
        if variant == "centered":
            pos = 0.5 * (a + b)
        else:
            pos = a + (b - a) * rng.random(width)
        positions[node : node + width] = pos
        node += width
        # children: left gets (a, pos], right gets (pos, b]
        new_lo = np.repeat(lo, 2, axis=0)
        new_hi = np.repeat(hi, 2, axis=0)
        new_hi[0::2][rows, j] = pos
        new_lo[1::2][rows, j] = pos
        lo, hi = new_lo, new_hi
    coords.setflags(write=False)
    positions.setflags(write=False)
    return TreeDescription(variant, depth, dim, coords, positions)


def sample_forest(variant, depth, dim, n_trees, seed) -> ForestModel:
    """Sample ``n_trees`` i.i.d. trees with per-tree substreams of ``seed``."""
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    trees = tuple(
        sample_tree(variant, depth, dim, _tree_rng(seed, i)) for i in range(n_trees)
    )
    return ForestModel(variant, check_depth(depth), check_dim(dim), int(seed), trees)


def leaf_index(tree: TreeDescription, X) -> np.ndarray:
    """Leaf index in [0, 2^depth) for each row of ``X``; vectorized descent."""
    X = check_unit_box(X, dim=tree.dim)
    node = np.zeros(X.shape[0], dtype=np.int64)
    for _ in range(tree.depth):
        j = tree.split_coordinate[node]
        pos = tree.split_position[node]
        goes_left = X[np.arange(X.shape[0]), j] <= pos
        node = 2 * node + np.where(goes_left, 1, 2)
    return node - ((1 << tree.depth) - 1)


def same_cell(tree: TreeDescription, x, z) -> bool:
    """True iff ``x`` and ``z`` reach the same leaf of ``tree``."""
    x = check_unit_point(x, dim=tree.dim)
    z = check_unit_point(z, dim=tree.dim)
    leaves = leaf_index(tree, np.vstack([x, z]))
    return bool(leaves[0] == leaves[1])


def leaf_boxes(tree: TreeDescription) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper bounds, shape (2^depth, dim) each, of every leaf cell."""
    lo = np.zeros((1, tree.dim))
    hi = np.ones((1, tree.dim))
    node = 0
    for _ in range(tree.depth):
        width = lo.shape[0]
        j = tree.split_coordinate[node : node + width]
        pos = tree.split_position[node : node + width]
        rows = np.arange(width)
        new_lo = np.repeat(lo, 2, axis=0)
        new_hi = np.repeat(hi, 2, axis=0)
        new_hi[0::2][rows, j] = pos
        new_lo[1::2][rows, j] = pos
        lo, hi = new_lo, new_hi
        node += width
    return lo, hi


def proximity(forest: ForestModel, x, z) -> float:
    """Fraction of the forest's trees in which ``x`` and ``z`` share a leaf."""
    x = check_unit_point(x, dim=forest.dim)
    z = check_unit_point(z, dim=forest.dim)
    hits = sum(same_cell(tree, x, z) for tree in forest.trees)
    return hits / forest.n_trees


def pair_proximity(variant, x, z, depth, n_trees, seed) -> float:
    """Monte Carlo estimate of the connection probability of ``x`` and ``z``.

    Walks both points down ``n_trees`` virtual trees simultaneously
    (vectorized across trees), tracking only the cell side of the chosen
    coordinate.  No tree is materialized, so ``n_trees`` in the hundreds of
    thousands is cheap.  Deterministic per ``seed``.
    """
    variant = _check_variant(variant)
    depth = check_depth(depth)
    x = check_unit_point(x)
    z = check_unit_point(z, dim=x.size)
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    dim = x.size
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed)])))
    coords = rng.integers(0, dim, size=(n_trees, depth))
    alive = np.ones(n_trees, dtype=bool)
    rows = np.arange(n_trees)
    if variant == "centered":
        splits = np.zeros((n_trees, dim), dtype=np.int64)
        for t in range(depth):
            j = coords[:, t]
            splits[rows, j] += 1
            level = splits[rows, j]
            cx = np.maximum(np.ceil(np.ldexp(x[j], level)), 1.0)
            cz = np.maximum(np.ceil(np.ldexp(z[j], level)), 1.0)
            alive &= cx == cz
    else:
        lo = np.zeros((n_trees, dim))
        hi = np.ones((n_trees, dim))
        for t in range(depth):
            j = coords[:, t]
            a = lo[rows, j]
            b = hi[rows, j]
            pos = a + (b - a) * rng.random(n_trees)
            left_x = x[j] <= pos
            left_z = z[j] <= pos
            alive &= left_x == left_z
            shrink_hi = np.where(left_x, pos, b)
            shrink_lo = np.where(left_x, a, pos)
            hi[rows, j] = shrink_hi
            lo[rows, j] = shrink_lo
    return float(alive.mean())


def forest_predict(forest: ForestModel, X, y, queries) -> np.ndarray:
    """Classical forest prediction: average over trees of per-tree leaf means.

    Trees whose leaf at a query is empty of training points contribute 0 to
    the average (the kernel estimators exist precisely to remove this
    artifact; the classical estimator is kept faithful for contrast).
    """
    X = check_unit_box(X, dim=forest.dim)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("training set must be non-empty")
    if y.shape != (X.shape[0],):
        raise ValueError("y must be 1-d with one response per training point")
    queries = check_unit_box(queries, dim=forest.dim)
    total = np.zeros(queries.shape[0])
    for tree in forest.trees:
        train_leaf = leaf_index(tree, X)
        query_leaf = leaf_index(tree, queries)
        sums = np.bincount(train_leaf, weights=y, minlength=tree.n_leaves)
        counts = np.bincount(train_leaf, minlength=tree.n_leaves)
        mean = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
        total += mean[query_leaf]
    return total / forest.n_trees
