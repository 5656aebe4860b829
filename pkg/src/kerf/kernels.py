"""Closed-form proximity kernels of centered and uniform random forests.

A depth-``k`` random tree splits the unit cube ``k`` times, each time picking
a coordinate uniformly at random.  The probability that two points end up in
the same leaf is a mixture over compositions ``l`` of ``k`` into ``d``
non-negative parts (how often each coordinate was split), weighted by the
multinomial law ``(k over l) / d^k``:

* centered trees split at cell midpoints, so two points survive ``l_j``
  splits on coordinate ``j`` exactly when they share the dyadic interval of
  resolution ``l_j``.  The survival indicator depends on the pair only
  through its *match profile* ``m`` (per-coordinate count of shared leading
  dyadic digits, capped at ``k``), and the kernel is the probability that a
  multinomial draw satisfies ``l <= m`` componentwise.

* uniform trees split at a uniform position inside the current cell side;
  anchored at the origin, the per-coordinate survival probability after
  ``t`` splits is the upper Poisson tail ``P(Poisson(-ln x) >= t)``.

Both kernels are evaluated by one degree-capped polynomial convolution
(O(k^2 d)) instead of enumerating all ``C(k+d-1, d-1)`` compositions.  The
centered kernel additionally has an exact big-rational backend whose values
have denominator ``d^k``.

All functions are pure and reentrant; there is no shared mutable state
beyond immutable memoization caches, so concurrent calls are safe.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._validation import check_depth, check_dim, check_unit_box, check_unit_point

__all__ = [
    "dyadic_cell",
    "match_profile",
    "match_profile_matrix",
    "composition_count",
    "centered_kernel",
    "centered_kernel_matrix",
    "uniform_kernel_factor",
    "uniform_kernel",
    "uniform_kernel_matrix",
]

# Largest lookup table (number of distinct match profiles) the matrix path
# will materialize before falling back to the direct convolution.
_MAX_LUT_SIZE = 1 << 20


def dyadic_cell(x, level):
    """Index of the dyadic interval of resolution ``level`` containing ``x``.

    Intervals at resolution ``t`` are ``((c-1)/2^t, c/2^t]`` for
    ``c = 1..2^t``; the point 0 is assigned to cell 1.  Multiplication by a
    power of two is exact in binary floating point, so the result is the
    mathematical ceiling of ``2^level * x`` (with 0 mapped to 1).
    """
    return np.maximum(np.ceil(np.ldexp(np.asarray(x, dtype=np.float64), level)), 1.0)


def match_profile(x, z, depth) -> np.ndarray:
    """Per-coordinate count of shared leading dyadic digits, capped at ``depth``.

    Parameters
    ----------
    x, z : array-like, shape (d,)
        Points in the unit cube.
    depth : int
        Cap ``k``; entry ``j`` is the largest ``t <= k`` such that ``x_j``
        and ``z_j`` lie in the same dyadic interval at every resolution
        ``s <= t``.

    Returns
    -------
    ndarray of int, shape (d,)
    """
    depth = check_depth(depth)
    x = check_unit_point(x)
    z = check_unit_point(z, dim=x.size)
    m = np.zeros(x.size, dtype=np.int64)
    for s in range(1, depth + 1):
        # Dyadic cells are nested, so agreement at resolution s implies
        # agreement at every coarser resolution; summing indicators gives m.
        m += dyadic_cell(x, s) == dyadic_cell(z, s)
    return m


def match_profile_matrix(X, Z, depth) -> np.ndarray:
    """Match profiles for all pairs of rows of ``X`` (q, d) and ``Z`` (n, d).

    Returns an int16 array of shape (q, n, d).
    """
    depth = check_depth(depth)
    X = check_unit_box(X)
    Z = check_unit_box(Z, dim=X.shape[1])
    q, d = X.shape
    n = Z.shape[0]
    m = np.zeros((q, n, d), dtype=np.int16)
    for s in range(1, depth + 1):
        cx = dyadic_cell(X, s)
        cz = dyadic_cell(Z, s)
        m += cx[:, None, :] == cz[None, :, :]
    return m


def composition_count(total, lows, highs) -> int:
    """Sum of multinomial coefficients over windowed compositions.

    Exact integer value of ``sum_l total! / prod_j l_j!`` over all
    compositions ``l`` of ``total`` with ``lows[j] <= l_j <= highs[j]``.
    Computed by a binomial convolution in the exponential-coefficient basis,
    O(d * total^2) big-integer operations.
    """
    counts = [0] * (total + 1)
    counts[0] = 1
    for lo, hi in zip(lows, highs):
        lo = max(int(lo), 0)
        hi = min(int(hi), total)
        new = [0] * (total + 1)
        for t in range(total + 1):
            acc = 0
            for u in range(lo, min(hi, t) + 1):
                c = counts[t - u]
                if c:
                    acc += math.comb(t, u) * c
            new[t] = acc
        counts = new
    return counts[total]


def centered_kernel_from_profile(profile, depth, dim=None, exact=False):
    """Centered-forest kernel value determined by a match profile.

    ``profile`` is the per-coordinate agreement vector ``m``; the value is
    ``P(multinomial(depth, uniform over dim) <= m componentwise)``, i.e.
    ``composition_count(depth, 0, m) / dim**depth``.
    """
    profile = np.asarray(profile, dtype=np.int64)
    depth = check_depth(depth)
    dim = check_dim(profile.size if dim is None else dim)
    count = composition_count(depth, [0] * profile.size, profile.tolist())
    value = Fraction(count, dim**depth)
    return value if exact else float(value)


def centered_kernel(x, z, depth, exact=False):
    """Probability that centered trees of the given depth keep ``x, z`` together.

    Parameters
    ----------
    x, z : array-like, shape (d,)
        Points in [0, 1]^d.
    depth : int
        Tree depth ``k >= 0``.
    exact : bool
        Return an exact ``Fraction`` (denominator ``d^depth``) instead of a
        float.

    Returns
    -------
    float or Fraction in [0, 1]; equals 1 when ``x == z`` or ``depth == 0``.
    """
    m = match_profile(x, z, depth)
    return centered_kernel_from_profile(m, depth, exact=exact)


@lru_cache(maxsize=64)
def _inv_factorials(depth: int) -> np.ndarray:
    return np.array([1.0 / math.factorial(t) for t in range(depth + 1)])


@lru_cache(maxsize=32)
def _centered_profile_lut(depth: int, dim: int) -> np.ndarray:
    """Kernel value for every match profile, indexed by mixed-radix packing.

    Index of profile ``m`` is ``sum_j m_j * (depth+1)**(dim-1-j)``.  Built by
    a vectorized convolution over coordinates; float64 throughout.
    """
    k = depth
    if k == 0:
        return np.ones(1)
    inv_fact = _inv_factorials(k)
    # P[m, t] = coefficient of z^t in the degree-capped series of coord poly
    P = np.tril(np.ones((k + 1, k + 1))) * inv_fact[None, :]
    C = np.zeros((1, k + 1))
    C[0, 0] = 1.0
    for _ in range(dim):
        new = np.zeros((C.shape[0], k + 1, k + 1))
        for t2 in range(k + 1):
            new[:, :, t2:] += C[:, None, : k + 1 - t2] * P[None, :, t2, None]
        C = new.reshape(-1, k + 1)
    return C[:, k] * (math.factorial(k) / float(dim) ** k)


def _kernel_from_profiles_lut(m: np.ndarray, depth: int, dim: int) -> np.ndarray:
    lut = _centered_profile_lut(depth, dim)
    radix = (depth + 1) ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    idx = (m.astype(np.int64) * radix).sum(axis=-1)
    return lut[idx]


def _convolve_capped(coeffs: np.ndarray, weights: np.ndarray, depth: int) -> np.ndarray:
    """One coordinate step of the degree-capped polynomial product.

    ``coeffs`` has shape (..., depth+1); ``weights`` has shape (..., depth+1)
    holding the coordinate polynomial's coefficients (already weighted by
    1/t!).  Returns the capped product coefficients.
    """
    out = np.zeros_like(coeffs)
    for t2 in range(depth + 1):
        out[..., t2:] += coeffs[..., : depth + 1 - t2] * weights[..., t2, None]
    return out


def _kernel_from_profiles_conv(m: np.ndarray, depth: int, dim: int) -> np.ndarray:
    inv_fact = _inv_factorials(depth)
    coeffs = np.zeros(m.shape[:-1] + (depth + 1,))
    coeffs[..., 0] = 1.0
    for j in range(dim):
        t = np.arange(depth + 1)
        weights = (m[..., j, None] >= t) * inv_fact
        coeffs = _convolve_capped(coeffs, weights, depth)
    return coeffs[..., depth] * (math.factorial(depth) / float(dim) ** depth)


def centered_kernel_matrix(X, Z, depth) -> np.ndarray:
    """Centered kernel for all pairs of rows of ``X`` (q, d) and ``Z`` (n, d).

    Float64 fast path used by the estimators; agrees with the exact backend
    to ~1e-15 relative.  Returns shape (q, n).
    """
    depth = check_depth(depth)
    X = check_unit_box(X)
    Z = check_unit_box(Z, dim=X.shape[1])
    dim = X.shape[1]
    if depth == 0:
        return np.ones((X.shape[0], Z.shape[0]))
    m = match_profile_matrix(X, Z, depth)
    if (depth + 1) ** dim <= _MAX_LUT_SIZE:
        return _kernel_from_profiles_lut(m, depth, dim)
    return _kernel_from_profiles_conv(m, depth, dim)


def uniform_kernel_factor(x, count) -> float:
    """Per-coordinate survival factor of the origin-anchored uniform forest.

    Equals ``1 - x * sum_{j<count} (-ln x)^j / j!`` for ``x`` in (0, 1],
    extended by continuity to 1 at ``x = 0``; this is the upper Poisson tail
    ``P(Poisson(-ln x) >= count)``, evaluated by a term recurrence whose
    terms stay bounded by 1 (the raw series in ``-ln x`` overflows for tiny
    ``x``).  The result is clamped to [0, 1].
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"coordinate must lie in [0, 1], got {x}")
    count = int(count)
    if count < 0:
        raise ValueError(f"split count must be >= 0, got {count}")
    if count == 0 or x == 0.0:
        return 1.0
    lam = -math.log(x)
    term = x  # x * lam^0 / 0!
    total = term
    for j in range(1, count):
        term *= lam / j
        total += term
    return min(max(1.0 - total, 0.0), 1.0)


def _uniform_factor_table(x: np.ndarray, depth: int) -> np.ndarray:
    """Factors for all counts 0..depth, vectorized: shape x.shape + (depth+1,).

    ``x = 0`` rows are handled by masking (the recurrence would produce
    0 * inf there).
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.ones(x.shape + (depth + 1,))
    if depth == 0:
        return out
    zero = x == 0.0
    with np.errstate(divide="ignore"):
        lam = -np.log(x)
    lam[zero] = 0.0
    term = x.copy()
    total = term.copy()
    for t in range(1, depth + 1):
        out[..., t] = np.clip(1.0 - total, 0.0, 1.0)
        term *= lam / t
        total += term
    out[zero, :] = 1.0
    return out


def uniform_kernel(x, depth) -> float:
    """Probability that uniform trees keep the origin and ``x`` together.

    Parameters
    ----------
    x : array-like, shape (d,)
        Displacement from the origin, coordinates in [0, 1].
    depth : int
        Tree depth ``k >= 0``.

    Returns
    -------
    float in [0, 1]; equals 1 at ``x = 0`` or ``depth == 0``.
    """
    depth = check_depth(depth)
    x = check_unit_point(x)
    if depth == 0:
        return 1.0
    value = uniform_kernel_matrix(x.reshape(1, 1, -1), depth)[0, 0]
    return float(value)


def uniform_kernel_matrix(D, depth) -> np.ndarray:
    """Uniform kernel of origin-anchored displacements ``D`` (..., d).

    Same degree-capped convolution as the centered matrix path, with the
    indicator weights replaced by Poisson-tail factors.
    """
    depth = check_depth(depth)
    D = np.asarray(D, dtype=np.float64)
    if D.ndim < 1:
        raise ValueError("displacement array must have at least one axis")
    if np.any(D < 0.0) or np.any(D > 1.0):
        raise ValueError("displacements must lie in [0, 1]")
    dim = D.shape[-1]
    check_dim(dim)
    if depth == 0:
        return np.ones(D.shape[:-1])
    inv_fact = _inv_factorials(depth)
    coeffs = np.zeros(D.shape[:-1] + (depth + 1,))
    coeffs[..., 0] = 1.0
    for j in range(dim):
        weights = _uniform_factor_table(D[..., j], depth) * inv_fact
        coeffs = _convolve_capped(coeffs, weights, depth)
    value = coeffs[..., depth] * (math.factorial(depth) / float(dim) ** depth)
    return np.clip(value, 0.0, 1.0)
