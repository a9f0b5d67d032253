"""Adaptive Gauss-Legendre panels for integrands with an integrable point singularity."""

from __future__ import annotations

import functools

import numpy as np
from scipy.special import roots_legendre

_ORDER = 8
_MAX_DEPTH = 48


@functools.lru_cache(maxsize=None)
def _rule(order):
    return roots_legendre(order)


def _gauss(f, lo, hi, order):
    """Gauss-Legendre value and the matching estimate of the integral of |f|."""
    x, w = _rule(order)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    y = np.asarray(f(mid + half * x), dtype=float)
    return half * float(np.dot(w, y)), half * float(np.dot(w, np.abs(y)))


def _adaptive(f, lo, hi, tol, depth=0, atol=0.0):
    coarse, _ = _gauss(f, lo, hi, _ORDER)
    fine, size = _gauss(f, lo, hi, 2 * _ORDER)
    # relative to the integral of |f|, so sign changes cannot stall the refinement
    err = abs(fine - coarse)
    if err <= max(tol * size, atol) or err < 1e-300 or depth >= _MAX_DEPTH:
        return fine
    mid = 0.5 * (lo + hi)
    return _adaptive(f, lo, mid, tol, depth + 1, atol) + _adaptive(f, mid, hi, tol, depth + 1, atol)


def _graded(f, lo, hi, tol):
    """Integrate with the singularity at ``lo``: dyadic panels shrinking toward it."""
    total = 0.0
    length = hi - lo
    right = hi
    # absolute floor from the outermost panel: near the singular point the
    # integrand is dominated by roundoff in the separation, and those panels
    # contribute O(d |ln d|) anyway
    _, scale = _gauss(f, lo + 0.5 * length, hi, 2 * _ORDER)
    atol = tol * scale
    for _ in range(_MAX_DEPTH):
        left = lo + 0.5 * (right - lo)
        total += _adaptive(f, left, right, tol, atol=atol)
        right = left
        # the dropped innermost panel of a log singularity contributes O(d |ln d|)
        if (right - lo) < 1e-14 * length:
            break
    return total


def panel_integral(f, lo: float, hi: float, singular_at: float | None = None, tol: float = 1e-10) -> float:
    """Integral of the vectorized ``f`` over ``[lo, hi]``.

    When ``singular_at`` lies in the closed panel, the panel is split there and
    each side is refined dyadically toward the singular point.
    """
    if hi <= lo:
        return 0.0
    if singular_at is None or not lo <= singular_at <= hi:
        return _adaptive(f, lo, hi, tol)
    total = 0.0
    if singular_at > lo:
        total += _graded(lambda t: f(singular_at - t), 0.0, singular_at - lo, tol)
    if singular_at < hi:
        total += _graded(lambda t: f(singular_at + t), 0.0, hi - singular_at, tol)
    return total
