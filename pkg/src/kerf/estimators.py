"""Kernel random forest regression estimators.

``KerfRegressor`` is the infinite-forest estimator: a Nadaraya-Watson ratio
whose weights are the closed-form proximity kernel of the chosen forest
variant, so predictions are convex combinations of training responses and
empty cells cannot occur.  ``FiniteKerfRegressor`` is the finite Monte
Carlo counterpart that pools cell counts across sampled trees.

Both follow the scikit-learn estimator protocol (``fit``/``predict``/
``get_params``) and compose with the usual model-selection tooling.  Fitted
models are immutable as far as prediction is concerned; batch prediction is
chunked over queries with per-row-independent arithmetic, so results do not
depend on chunking or scheduling.
"""

from __future__ import annotations

import json

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_depth, check_unit_box
from .forest import ForestModel, leaf_index, sample_forest
from .kernels import centered_kernel_matrix, uniform_kernel_matrix

__all__ = [
    "KerfRegressor",
    "FiniteKerfRegressor",
    "finite_kerf_predict",
    "l2_error",
    "save_model",
    "load_model",
]

MODEL_FORMAT_VERSION = 1

# Query chunks sized so the (chunk, n_train, depth+1) work arrays stay small.
_CHUNK_BUDGET = 1 << 24


def _check_fit_inputs(X, y):
    X = check_unit_box(X)
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValueError("y must be 1-d with one response per training row")
    if X.shape[0] < 1:
        raise ValueError("training set must contain at least one point")
    if not np.all(np.isfinite(y)):
        raise ValueError("responses must be finite")
    return X, y


def _nadaraya_watson(weights: np.ndarray, y: np.ndarray, mean: float) -> np.ndarray:
    # Responses are centered so a constant target is reproduced bit-exactly
    # and the weighted sum cancels less.  Row-wise pairwise summation (not a
    # BLAS matvec) keeps each row's result independent of the chunk shape.
    num = (weights * (y - mean)).sum(axis=1)
    den = weights.sum(axis=1)
    delta = np.zeros(num.shape)
    np.divide(num, den, out=delta, where=den > 0)
    return mean + delta


class KerfRegressor(BaseEstimator, RegressorMixin):
    """Infinite kernel random forest regression.

    Parameters
    ----------
    variant : {"centered", "uniform"}, default="centered"
        Forest flavour.  Centered forests split cells at midpoints and the
        kernel compares dyadic digits of the two points; uniform forests
        split at uniform positions and the kernel is translation invariant,
        evaluated at the componentwise absolute difference ``|X_i - x|``.
    depth : int or None, default=None
        Tree depth ``k``.  If None, it is chosen at fit time from the
        training size by ``depth_rule``.
    depth_rule : {"scornet", "improved", "interpolation"}, default="improved"
        Depth-selection rule used when ``depth`` is None.

    Attributes
    ----------
    depth_ : int
        Depth actually used.
    X_, y_ : ndarray
        Stored training data (the estimator is a weighted nearest-neighbour
        scheme; nothing else is learned).

    Notes
    -----
    When every kernel weight at a query vanishes (possible for the centered
    kernel once no training point shares its coarsest dyadic cell), the
    prediction falls back to the global training mean so that the estimator
    stays total and bounded.  Weight sums use numpy pairwise summation.
    """

    def __init__(self, variant="centered", depth=None, depth_rule="improved"):
        self.variant = variant
        self.depth = depth
        self.depth_rule = depth_rule

    def _resolve_depth(self, n: int) -> int:
        if self.depth is not None:
            return check_depth(self.depth)
        from .experiments import depth_for  # local import; experiments uses this module

        return depth_for(self.variant, self.depth_rule, n, self.dim_)

    def fit(self, X, y):
        if self.variant not in ("centered", "uniform"):
            raise ValueError(f"unknown variant {self.variant!r}")
        X, y = _check_fit_inputs(X, y)
        self.X_ = X
        self.y_ = y
        self.dim_ = X.shape[1]
        self.n_features_in_ = X.shape[1]
        self.y_mean_ = float(y.mean())
        self.depth_ = self._resolve_depth(X.shape[0])
        return self

    def _weights(self, Q: np.ndarray) -> np.ndarray:
        if self.variant == "centered":
            return centered_kernel_matrix(Q, self.X_, self.depth_)
        D = np.abs(Q[:, None, :] - self.X_[None, :, :])
        return uniform_kernel_matrix(D, self.depth_)

    def predict(self, X):
        check_is_fitted(self, "X_")
        Q = check_unit_box(X, dim=self.dim_)
        out = np.empty(Q.shape[0])
        n = self.X_.shape[0]
        chunk = max(1, _CHUNK_BUDGET // (n * (self.depth_ + 1) + 1))
        for start in range(0, Q.shape[0], chunk):
            block = Q[start : start + chunk]
            out[start : start + chunk] = _nadaraya_watson(
                self._weights(block), self.y_, self.y_mean_
            )
        return out


class FiniteKerfRegressor(BaseEstimator, RegressorMixin):
    """Finite-forest KeRF: proximity weights from ``n_trees`` sampled trees.

    Pools, over all trees, the response sums and occupancy counts of the
    cells containing each query; empty cells simply add nothing to either
    sum.  Converges to :class:`KerfRegressor` as ``n_trees`` grows.
    """

    def __init__(self, variant="centered", depth=2, n_trees=100, random_state=0):
        self.variant = variant
        self.depth = depth
        self.n_trees = n_trees
        self.random_state = random_state

    def fit(self, X, y):
        X, y = _check_fit_inputs(X, y)
        self.X_ = X
        self.y_ = y
        self.dim_ = X.shape[1]
        self.n_features_in_ = X.shape[1]
        self.y_mean_ = float(y.mean())
        self.forest_ = sample_forest(
            self.variant, self.depth, self.dim_, self.n_trees, self.random_state
        )
        return self

    def predict(self, X):
        check_is_fitted(self, "forest_")
        Q = check_unit_box(X, dim=self.dim_)
        return finite_kerf_predict(self.forest_, self.X_, self.y_, Q, self.y_mean_)


def finite_kerf_predict(forest: ForestModel, X, y, queries, fallback=None) -> np.ndarray:
    """Finite-forest KeRF prediction for ``queries``.

    ``fallback`` (default: global training mean) is used where no tree puts
    any training point in the query's cell.
    """
    X = check_unit_box(X, dim=forest.dim)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("training set must be non-empty")
    if y.shape != (X.shape[0],):
        raise ValueError("y must be 1-d with one response per training point")
    Q = check_unit_box(queries, dim=forest.dim)
    if fallback is None:
        fallback = float(y.mean())
    centered = y - fallback
    num = np.zeros(Q.shape[0])
    den = np.zeros(Q.shape[0])
    for tree in forest.trees:
        train_leaf = leaf_index(tree, X)
        query_leaf = leaf_index(tree, Q)
        sums = np.bincount(train_leaf, weights=centered, minlength=tree.n_leaves)
        counts = np.bincount(train_leaf, minlength=tree.n_leaves)
        num += sums[query_leaf]
        den += counts[query_leaf]
    delta = np.zeros(Q.shape[0])
    np.divide(num, den, out=delta, where=den > 0)
    return fallback + delta


def l2_error(predictor, X, y) -> float:
    """Mean squared difference between predictions and responses.

    ``predictor`` is a fitted estimator (anything with ``predict``) or a
    callable mapping an (n, d) array to predictions.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ValueError("test set must be non-empty")
    predict = predictor.predict if hasattr(predictor, "predict") else predictor
    pred = np.asarray(predict(X), dtype=np.float64)
    return float(np.mean((pred - y) ** 2))


def save_model(model: KerfRegressor, path) -> None:
    """Serialize a fitted :class:`KerfRegressor` to versioned JSON."""
    check_is_fitted(model, "X_")
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "variant": model.variant,
        "depth": int(model.depth_),
        "dim": int(model.dim_),
        "X": model.X_.tolist(),
        "y": model.y_.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> KerfRegressor:
    """Rebuild a :class:`KerfRegressor` from :func:`save_model` output."""
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}")
    model = KerfRegressor(variant=doc["variant"], depth=int(doc["depth"]))
    model.fit(np.asarray(doc["X"], dtype=np.float64), np.asarray(doc["y"], dtype=np.float64))
    if model.dim_ != int(doc["dim"]):
        raise ValueError("model dim does not match stored training data")
    return model
