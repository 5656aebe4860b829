"""Input validation helpers shared across the package.

All estimators and kernel functions operate on points in the unit cube
[0, 1]^d.  Clamping is deliberately not offered: a coordinate outside the
cube is a caller bug and raises ``ValueError``.
"""

from __future__ import annotations

import numbers

import numpy as np


def check_depth(depth) -> int:
    """Validate a tree depth (non-negative integer)."""
    if not isinstance(depth, numbers.Integral):
        raise TypeError(f"depth must be an integer, got {type(depth).__name__}")
    depth = int(depth)
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    return depth


def check_dim(dim) -> int:
    """Validate a feature-space dimension (positive integer)."""
    if not isinstance(dim, numbers.Integral):
        raise TypeError(f"dim must be an integer, got {type(dim).__name__}")
    dim = int(dim)
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return dim


def check_unit_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-d float64 array and verify it lies in [0, 1]^d."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1:
        raise ValueError(f"expected a single point, got array of shape {x.shape}")
    if dim is not None and x.size != dim:
        raise ValueError(f"point has {x.size} coordinates, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite coordinates")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"coordinates must lie in [0, 1], got {x.tolist()}")
    return x


def check_unit_box(X, dim: int | None = None) -> np.ndarray:
    """Coerce ``X`` to a 2-d float64 array of points in [0, 1]^d."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array of points, got shape {X.shape}")
    if dim is not None and X.shape[1] != dim:
        raise ValueError(f"points have {X.shape[1]} coordinates, expected {dim}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input has non-finite coordinates")
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    return X
