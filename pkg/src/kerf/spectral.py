"""Exact Fourier analysis of the centered-forest kernel on a finite group.

Truncating every coordinate of [0, 1] to its first ``k`` dyadic digits turns
the centered kernel into a positive definite function ``phi`` on the group
``G = Z_2^(k*d)`` of k-by-d bit matrices:

    phi(a) = sum over compositions l of k:  multinomial(k, l) / d^k
             * prod_j [rows 1..l_j of column j of a are all zero]

so that ``phi(a XOR b)`` equals the centered kernel of any two points whose
dyadic digits disagree exactly in the set bits of ``a XOR b``.  The inverse
group transform ``mu`` of ``phi`` is a probability measure (this is the
constructive half of Bochner's characterization of positive definiteness);
its support, the set of bit matrices whose columns vanish below some
composition, spans the reproducing kernel Hilbert space of ``phi``, and its
size is the k-th coefficient of the generating function

    f(z) = 1/(1-z) * ((1-z)/(1-2z))^d.

Everything here is exact: integers and ``fractions.Fraction`` throughout,
floats only in the asymptotic-ratio helpers.  All operations are pure and
reentrant.

Bit layout
----------
A bit matrix ``x`` with rows ``i = 1..k`` (dyadic resolution, row 1 most
significant) and columns ``j = 1..d`` (coordinate) is packed column-major
into a Python int: entry ``(i, j)`` lives at bit ``(j-1)*k + (i-1)``, so
each coordinate's column occupies ``k`` consecutive bits.  Group addition is
XOR; characters are ``(-1)^popcount(a & x)``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._validation import check_depth, check_dim
from .kernels import composition_count

__all__ = [
    "group_size",
    "pack_bits",
    "unpack_bits",
    "character",
    "phi",
    "phi_table",
    "forward_transform",
    "inverse_transform",
    "spectral_measure",
    "spectral_support",
    "rkhs_dimension",
    "dimension_asymptotic",
    "dimension_ratio",
    "rkhs_norm",
    "onb_reconstruct",
    "membership_test",
    "multiplier_check",
]

# Dense group functions allocate 2^(k*d) entries; refuse beyond this.
_MAX_DENSE_BITS = 20
# Full N x N kernel tables are quadratic in the group size; refuse earlier.
_MAX_TABLE_BITS = 10
# Sparse support enumeration is refused beyond this many elements.
_MAX_SUPPORT = 1 << 22


def group_size(depth, dim) -> int:
    return 1 << (check_depth(depth) * check_dim(dim))


def _check_dense(depth, dim) -> int:
    bits = check_depth(depth) * check_dim(dim)
    if bits > _MAX_DENSE_BITS:
        raise ValueError(
            f"dense spectral computation needs 2^(k*d) entries; "
            f"k*d = {bits} exceeds the limit of {_MAX_DENSE_BITS}"
        )
    return 1 << bits


def pack_bits(bits, depth, dim) -> int:
    """Pack a (depth, dim) 0/1 matrix into the column-major int code."""
    bits = np.asarray(bits)
    if bits.shape != (depth, dim):
        raise ValueError(f"bit matrix must have shape ({depth}, {dim}), got {bits.shape}")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bit matrix entries must be 0 or 1")
    code = 0
    for j in range(dim):
        for i in range(depth):
            if bits[i, j]:
                code |= 1 << (j * depth + i)
    return code


def unpack_bits(code, depth, dim) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a (depth, dim) uint8 matrix."""
    out = np.zeros((depth, dim), dtype=np.uint8)
    for j in range(dim):
        for i in range(depth):
            out[i, j] = (code >> (j * depth + i)) & 1
    return out


def character(a: int, x: int) -> int:
    """Value of the character labelled ``a`` at ``x``: (-1)^(a.x)."""
    return -1 if (a & x).bit_count() & 1 else 1


def _column(code: int, j: int, depth: int) -> int:
    return (code >> (j * depth)) & ((1 << depth) - 1)


def _leading_zero_profile(code: int, depth: int, dim: int) -> tuple:
    """Per column, the number of all-zero rows before the first set bit."""
    prof = []
    for j in range(dim):
        col = _column(code, j, depth)
        prof.append(depth if col == 0 else (col & -col).bit_length() - 1)
    return tuple(prof)


def _deepest_one_profile(code: int, depth: int, dim: int) -> tuple:
    """Per column, the row index of the deepest set bit (0 if the column is zero)."""
    return tuple(_column(code, j, depth).bit_length() for j in range(dim))


def phi(a, depth, dim) -> Fraction:
    """The kernel-defining positive definite function at ``a``.

    ``a`` may be a packed int code or a (depth, dim) bit matrix.  The value
    is exact with denominator ``dim**depth``: compositions ``l`` of
    ``depth`` contribute their multinomial weight whenever every column
    ``j`` of ``a`` is zero in rows 1..l_j, i.e. whenever ``l`` is capped by
    the leading-zero profile of ``a``.
    """
    depth = check_depth(depth)
    dim = check_dim(dim)
    if not isinstance(a, (int, np.integer)):
        a = pack_bits(a, depth, dim)
    caps = _leading_zero_profile(int(a), depth, dim)
    return Fraction(composition_count(depth, [0] * dim, caps), dim**depth)


def phi_table(depth, dim) -> list:
    """Dense table of ``phi`` over the whole group, memoized per profile."""
    size = _check_dense(depth, dim)
    denom = dim**depth
    cache: dict[tuple, Fraction] = {}
    out = []
    for code in range(size):
        caps = _leading_zero_profile(code, depth, dim)
        val = cache.get(caps)
        if val is None:
            val = Fraction(composition_count(depth, [0] * dim, caps), denom)
            cache[caps] = val
        out.append(val)
    return out


def _fwht(values) -> list:
    """In-place-style fast Walsh-Hadamard butterfly; exact on ints/Fractions."""
    vals = list(values)
    n = len(vals)
    if n & (n - 1) or n == 0:
        raise ValueError(f"dense group functions must have power-of-two size, got {n}")
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for i in range(start, start + h):
                a, b = vals[i], vals[i + h]
                vals[i] = a + b
                vals[i + h] = a - b
        h *= 2
    return vals


def forward_transform(values) -> list:
    """Group Fourier transform: out[a] = sum_x f(x) * (-1)^(a.x)."""
    return _fwht(values)


def inverse_transform(values) -> list:
    """Inverse transform: out[x] = (1/N) sum_a f(a) * (-1)^(a.x), exact."""
    transformed = _fwht(values)
    n = Fraction(1, len(transformed))
    return [v * n for v in transformed]


def spectral_measure(depth, dim) -> dict:
    """Closed-form inverse transform of ``phi``: packed code -> positive Fraction.

    A bit matrix lies in the support iff some composition ``l`` of ``depth``
    dominates its deepest-one profile ``m`` (so all rows below ``l_j`` are
    zero in every column); its mass is

        mu(x) = sum over compositions l >= m of multinomial(depth, l)
                / (2^depth * dim^depth).

    The masses depend on ``x`` only through ``m``; enumeration walks the
    profiles with ``sum(m) <= depth`` and fills in the free high rows.
    Values sum to 1 exactly.
    """
    depth = check_depth(depth)
    dim = check_dim(dim)
    if rkhs_dimension(depth, dim) > _MAX_SUPPORT:
        raise ValueError(
            f"support of the spectral measure exceeds {_MAX_SUPPORT} elements "
            f"for depth={depth}, dim={dim}"
        )
    denom = (1 << depth) * dim**depth
    mu: dict[int, Fraction] = {}

    def column_codes(m_j: int) -> list[int]:
        if m_j == 0:
            return [0]
        top = 1 << (m_j - 1)
        return [free | top for free in range(top)]

    def walk(j: int, remaining: int, profile: list[int]):
        if j == dim:
            mass = Fraction(composition_count(depth, profile, [depth] * dim), denom)
            per_column = [column_codes(m_j) for m_j in profile]
            _fill_codes(per_column, 0, 0, mass)
            return
        for m_j in range(remaining + 1):
            profile.append(m_j)
            walk(j + 1, remaining - m_j, profile)
            profile.pop()

    def _fill_codes(per_column, j, acc, mass):
        if j == dim:
            mu[acc] = mass
            return
        for col in per_column[j]:
            _fill_codes(per_column, j + 1, acc | (col << (j * depth)), mass)

    walk(0, depth, [])
    return mu


def spectral_support(depth, dim) -> frozenset:
    """Packed codes of the support of the spectral measure."""
    return frozenset(spectral_measure(depth, dim))


def rkhs_dimension(depth, dim) -> int:
    """Dimension of the kernel's RKHS, i.e. the size of the spectral support.

    Extracted as the ``depth``-th coefficient of
    ``1/(1-z) * ((1-z)/(1-2z))^dim`` by truncated big-integer series
    arithmetic; no group enumeration, so any (depth, dim) is fine.
    """
    k = check_depth(depth)
    dim = check_dim(dim)
    # (1-z)/(1-2z) = 1 + z + 2 z^2 + 4 z^3 + ... truncated at degree k
    base = [1] + [1 << (t - 1) for t in range(1, k + 1)]
    series = [1] + [0] * k
    for _ in range(dim):
        series = [
            sum(series[s] * base[t - s] for s in range(t + 1)) for t in range(k + 1)
        ]
    # final factor 1/(1-z) turns the k-th coefficient into a prefix sum
    return sum(series)


def dimension_asymptotic(depth, dim) -> float:
    """Leading-order size of the RKHS dimension: 2^(k-d+1) k^(d-1) / (d-1)!."""
    return float(_dimension_asymptotic_exact(depth, dim))


def _dimension_asymptotic_exact(depth, dim) -> Fraction:
    k = check_depth(depth)
    d = check_dim(dim)
    if k < 1:
        raise ValueError("asymptotic formula needs depth >= 1")
    return Fraction(2) ** (k - d + 1) * Fraction(k ** (d - 1), math.factorial(d - 1))


def dimension_ratio(depth, dim) -> float:
    """Exact dimension divided by its asymptotic estimate (rational, then float)."""
    exact = Fraction(rkhs_dimension(depth, dim))
    return float(exact / _dimension_asymptotic_exact(depth, dim))


def rkhs_norm(coeffs, depth, dim) -> Fraction:
    """Squared RKHS norm of ``sum_b coeffs[b] K_b``.

    ``coeffs`` is a dense rational/int sequence over the group (one entry
    per packed code).  Uses the isometry onto L^2 of the spectral measure:

        ||sum_b c(b) K_b||^2 = N^2 * sum_x mu(x) * c_check(x)^2,  N = 2^(k d)

    which equals the Gram quadratic form ``sum_{a,b} c(a) c(b) phi(a-b)``
    exactly.
    """
    size = _check_dense(depth, dim)
    if len(coeffs) != size:
        raise ValueError(f"coefficient vector must have length {size}, got {len(coeffs)}")
    c_check = inverse_transform([Fraction(c) for c in coeffs])
    mu = spectral_measure(depth, dim)
    total = Fraction(0)
    for x, mass in mu.items():
        total += mass * c_check[x] * c_check[x]
    return total * size * size


def onb_reconstruct(depth, dim) -> np.ndarray:
    """Kernel table rebuilt from the orthonormal basis of the RKHS.

    The basis functions indexed by support points ``x`` are
    ``e_x(a) = sqrt(mu(x)) * (-1)^(a.x)``; the products
    ``e_x(a) * conj(e_x(b))`` need no square roots, so the reconstruction

        T[a, b] = sum_{x in support} mu(x) * (-1)^((a XOR b).x)

    is exact and must reproduce ``phi(a XOR b)`` entrywise.  Returns an
    object array of Fractions of shape (N, N).
    """
    bits = check_depth(depth) * check_dim(dim)
    if bits > _MAX_TABLE_BITS:
        raise ValueError(
            f"full kernel tables need 4^(k*d) entries; k*d = {bits} exceeds "
            f"the limit of {_MAX_TABLE_BITS}"
        )
    size = _check_dense(depth, dim)
    mu = spectral_measure(depth, dim)
    row = [sum((mass if character(c, x) == 1 else -mass) for x, mass in mu.items())
           for c in range(size)]
    table = np.empty((size, size), dtype=object)
    for a in range(size):
        for b in range(size):
            table[a, b] = row[a ^ b]
    return table


def membership_test(values, depth, dim) -> bool:
    """Whether a dense function on the dual group lies in the kernel's RKHS.

    True iff its inverse transform vanishes outside the spectral support.
    """
    size = _check_dense(depth, dim)
    if len(values) != size:
        raise ValueError(f"function must have length {size}, got {len(values)}")
    checked = inverse_transform([Fraction(v) for v in values])
    support = spectral_support(depth, dim)
    return all(v == 0 for x, v in enumerate(checked) if x not in support)


def multiplier_check(depth, dim) -> bool:
    """Translation obstruction ruling out nonconstant multipliers of the RKHS.

    Returns True iff every nonzero ``a`` in the support admits some support
    point ``x`` with ``x XOR a`` outside the support; a multiplier with a
    nonzero inverse-transform coefficient at ``a`` would force the support
    to be closed under translation by ``a``.  For dim = 1 the support is
    the whole group, the obstruction never fires, and the result is False
    (every function is then a multiplier).
    """
    support = spectral_support(depth, dim)
    for a in support:
        if a == 0:
            continue
        if all((x ^ a) in support for x in support):
            return False
    return True
