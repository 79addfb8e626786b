"""Orthogonal polynomials and spherical harmonics for S^1 and S^2.

Gegenbauer polynomials C_l^(lam) follow the generating function

    (1 + r^2 - 2 r x)^(-lam) = sum_l r^l C_l^(lam)(x),   lam > 0,

with the lam = 0 convention C_l^(0)(cos s) = cos(l s).  Associated
Legendre functions P_l^(m) carry the Condon-Shortley phase (-1)^m, and
the complex spherical harmonics are

    d=1:  Y_(l,k,1)(theta) = exp(i k l theta) / sqrt(2 pi),
          k in {0} for l=0 and {-1, +1} for l >= 1;
    d=2:  Y_(l,k,2)(colat, lon)
            = sqrt((2l+1)/(4 pi) * (l-k)!/(l+k)!) P_l^(k)(cos colat) e^(i k lon),
          k in {-l, ..., l}.
"""

from __future__ import annotations

import math
from functools import lru_cache
from math import comb, lgamma

import numpy as np

from .sphere import SpherePoint

FOUR_PI = 4.0 * math.pi


def gegenbauer(ell: int, lam: float, x):
    """C_ell^(lam)(x) on [-1, 1] by the three-term recurrence.

    lam = 0 is evaluated as cos(ell * arccos x).
    """
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    if lam < 0:
        raise ValueError("lam must be >= 0")
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("argument must lie in [-1, 1]")
    scalar = np.ndim(x) == 0
    arr = np.clip(np.atleast_1d(arr), -1.0, 1.0)
    out = gegenbauer_table(ell, lam, arr)[ell]
    return float(out[0]) if scalar else out


def gegenbauer_table(n_max: int, lam: float, x) -> np.ndarray:
    """All C_l^(lam)(x) for l = 0..n_max, shape (n_max+1,) + x.shape."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1,) + arr.shape)
    if lam == 0.0:
        s = np.arccos(np.clip(arr, -1.0, 1.0))
        for ell in range(n_max + 1):
            out[ell] = np.cos(ell * s)
        return out
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2.0 * lam * arr
    for ell in range(2, n_max + 1):
        out[ell] = (
            2.0 * (ell + lam - 1.0) * arr * out[ell - 1]
            - (ell + 2.0 * lam - 2.0) * out[ell - 2]
        ) / ell
    return out


def gegenbauer_at_one(ell: int, lam: float) -> float:
    """C_ell^(lam)(1); equals binom(ell + 2 lam - 1, ell), and 1 for lam = 0."""
    if lam == 0.0:
        return 1.0
    two_lam = 2.0 * lam
    if two_lam == int(two_lam):
        return float(comb(ell + int(two_lam) - 1, ell))
    return math.exp(lgamma(ell + two_lam) - lgamma(ell + 1) - lgamma(two_lam))


def normalized_gegenbauer_table(n_max: int, dim: int, x) -> np.ndarray:
    """C_l^((d-1)/2)(x) / C_l^((d-1)/2)(1) for l = 0..n_max.

    These are the basis functions of the d-Schoenberg expansion:
    cos(l s) for d=1, Legendre P_l for d=2.
    """
    lam = (dim - 1) / 2.0
    table = gegenbauer_table(n_max, lam, x)
    if lam > 0.0:
        norms = np.array([gegenbauer_at_one(ell, lam) for ell in range(n_max + 1)])
        table /= norms.reshape((-1,) + (1,) * (table.ndim - 1))
    return table


def legendre(ell: int, x):
    """Legendre polynomial P_ell = C_ell^(1/2)."""
    return gegenbauer(ell, 0.5, x)


def _factorial_ratio(ell: int, m: int) -> float:
    """(ell - m)! / (ell + m)!, in log space for ell > 30."""
    if ell <= 30:
        return math.factorial(ell - m) / math.factorial(ell + m)
    return math.exp(lgamma(ell - m + 1) - lgamma(ell + m + 1))


def assoc_legendre(ell: int, m: int, x):
    """Associated Legendre P_ell^(m)(x) with the Condon-Shortley phase.

    Computed by the stable forward recurrence in ell at fixed m, seeded
    with P_m^(m) = (-1)^m (2m-1)!! (1-x^2)^(m/2).  Negative orders use
    P_ell^(-m) = (-1)^m (ell-m)!/(ell+m)! P_ell^(m).
    """
    if abs(m) > ell:
        raise ValueError(f"order |m| <= degree required, got m={m}, ell={ell}")
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("argument must lie in [-1, 1]")
    arr = np.clip(arr, -1.0, 1.0)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    arr = np.atleast_1d(arr)
    if m < 0:
        base = assoc_legendre(ell, -m, arr)
        out = ((-1) ** (-m)) * _factorial_ratio(ell, -m) * base
        return float(out[0]) if scalar and out.shape == (1,) else out

    # P_m^m, built factor by factor to avoid a separate (2m-1)!!
    pmm = np.ones_like(arr)
    if m > 0:
        sx = np.sqrt(np.maximum(0.0, 1.0 - arr * arr))
        for k in range(1, m + 1):
            pmm *= -(2.0 * k - 1.0) * sx
    if ell == m:
        out = pmm
    else:
        pm1 = arr * (2.0 * m + 1.0) * pmm
        if ell == m + 1:
            out = pm1
        else:
            for cur in range(m + 2, ell + 1):
                pmm, pm1 = pm1, (
                    arr * (2.0 * cur - 1.0) * pm1 - (cur + m - 1.0) * pmm
                ) / (cur - m)
            out = pm1
    return float(out[0]) if scalar and out.shape == (1,) else out


def multiplicity(ell: int, dim: int) -> int:
    """Eigenvalue multiplicity m_(l,d) of the level-l harmonic space.

    m_(0,1) = 1 and m_(l,1) = 2; for d >= 2,
    m_(l,d) = (2l+d-1)/(d-1) * binom(l+d-2, l), i.e. 2l+1 when d=2.
    """
    if ell < 0:
        raise ValueError("level must be nonnegative")
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if dim == 1:
        return 1 if ell == 0 else 2
    if ell == 0:
        return 1
    return comb(ell + dim - 1, ell) + comb(ell + dim - 2, ell - 1)


def multiplicities(n_max: int, dim: int) -> np.ndarray:
    return np.array([multiplicity(ell, dim) for ell in range(n_max + 1)], dtype=float)


def index_set(ell: int, dim: int) -> list:
    """Orders k of the level-ell eigenfunctions (size = multiplicity)."""
    if dim == 1:
        return [0] if ell == 0 else [-1, 1]
    if dim == 2:
        return list(range(-ell, ell + 1))
    raise ValueError("explicit eigenfunction index sets exist for d in {1, 2} only")


def sh_bound_sq(dim: int, ell: int, k: int) -> float:
    """Provable upper bound on |Y_(l,k,d)|^2, uniform over the sphere.

    d=1: |Y|^2 is the constant 1/(2 pi).  d=2: each summand of the
    addition formula is at most the whole sum, so
    |Y_(l,k,2)|^2 <= (2l+1)/(4 pi), with equality at the poles for k=0.
    (Equivalently sup |P_l^(k)|^2 <= (l+|k|)!/(l-|k|)!.)
    """
    if dim == 1:
        return 1.0 / (2.0 * math.pi)
    if dim == 2:
        return (2.0 * ell + 1.0) / FOUR_PI
    raise ValueError("bounds available for d in {1, 2} only")


@lru_cache(maxsize=8)
def plm_sup_sq(l_max: int) -> np.ndarray:
    """Certified sup over the sphere of the normalized |P_l^(m)|^2 table.

    P_l^(m)(cos theta) is a trigonometric polynomial of degree l, so by
    the Ehlich-Zeller inequality its sup is at most the max over a
    uniform theta grid of 2K points divided by cos(pi l / (2K)).  The
    returned (L+1, L+1) array is a rigorous upper bound, much sharper
    than the addition-formula bound for |m| near l.
    """
    L = l_max
    K = 4 * max(L, 1) + 64
    theta = np.linspace(0.0, math.pi, K + 1)
    x = np.cos(theta)
    sx = np.sin(theta)
    sup = np.zeros((L + 1, L + 1))
    # degree-by-degree sweep keeping two full rows (m x grid); same
    # recurrences as norm_plm_table but reduced over the grid on the fly
    prev2 = np.zeros((L + 1, K + 1))
    prev1 = np.zeros((L + 1, K + 1))
    prev1[0] = 1.0 / math.sqrt(FOUR_PI)
    sup[0, 0] = float(np.max(np.abs(prev1[0])))
    for ell in range(1, L + 1):
        row = np.zeros((L + 1, K + 1))
        if ell >= 2:
            ms = np.arange(0, ell - 1)
            a = np.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - ms * ms))[:, None]
            b = np.sqrt(((ell - 1.0) ** 2 - ms * ms) / (4.0 * (ell - 1.0) ** 2 - 1.0))[:, None]
            row[: ell - 1] = a * (x * prev1[: ell - 1] - b * prev2[: ell - 1])
        row[ell - 1] = math.sqrt(2.0 * ell + 1.0) * x * prev1[ell - 1]
        row[ell] = -math.sqrt((2.0 * ell + 1.0) / (2.0 * ell)) * sx * prev1[ell - 1]
        sup[ell, : ell + 1] = np.max(np.abs(row[: ell + 1]), axis=1)
        prev2, prev1 = prev1, row
    safety = 1.0 / math.cos(math.pi * max(L, 1) / (2.0 * K))
    return (sup * safety) ** 2


def spherical_harmonic(dim: int, ell: int, k: int, point: SpherePoint) -> complex:
    """Evaluate Y_(l,k,d) at a point (d in {1, 2})."""
    if dim != point.dim:
        raise ValueError("point dimension does not match requested dimension")
    if dim == 1:
        if k not in index_set(ell, 1):
            raise ValueError(f"order {k} not valid at level {ell} for d=1")
        return complex(np.exp(1j * k * ell * point.theta) / math.sqrt(2.0 * math.pi))
    if dim == 2:
        if abs(k) > ell:
            raise ValueError(f"order {k} not valid at level {ell} for d=2")
        norm = math.sqrt((2.0 * ell + 1.0) / FOUR_PI * _factorial_ratio(ell, k))
        plk = assoc_legendre(ell, k, math.cos(point.colat))
        return complex(norm * plk * np.exp(1j * k * point.lon))
    raise ValueError("eigenfunctions implemented for d in {1, 2} only")


def norm_plm_table(l_max: int, x) -> np.ndarray:
    """Fully normalized associated Legendre table, shape (L+1, L+1) + x.shape.

    Entry [l, m] is sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^(m)(x) for
    m <= l (zero above the diagonal).  The normalized recurrence keeps
    every value bounded by sqrt((2l+1)/(4 pi)), so high levels do not
    overflow the way raw P_l^(m) do.
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    L = l_max
    out = np.zeros((L + 1, L + 1) + arr.shape)
    sx = np.sqrt(np.maximum(0.0, 1.0 - arr * arr))
    out[0, 0] = 1.0 / math.sqrt(FOUR_PI)
    for m in range(1, L + 1):
        out[m, m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx * out[m - 1, m - 1]
    for m in range(0, L):
        out[m + 1, m] = math.sqrt(2.0 * m + 3.0) * arr * out[m, m]
    for ell in range(2, L + 1):
        ms = np.arange(0, ell - 1)
        a = np.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - ms * ms))
        b = np.sqrt(((ell - 1.0) ** 2 - ms * ms) / (4.0 * (ell - 1.0) ** 2 - 1.0))
        shape = (-1,) + (1,) * arr.ndim
        out[ell, : ell - 1] = a.reshape(shape) * (
            arr * out[ell - 1, : ell - 1] - b.reshape(shape) * out[ell - 2, : ell - 1]
        )
    return out
