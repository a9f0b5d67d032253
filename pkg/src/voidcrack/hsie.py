"""Solvers for the normalized hypersingular equation

    fp int_{-a}^{a} [1/(x-t)**2 + Kr(x-t)] g(t) dt = f(x),    |x| < a.

``solve`` is the piecewise-constant midpoint collocation scheme: on a uniform
grid the finite-part panel integrals of ``1/(x-t)**2`` are exact,
``1/(x_i - t_{j+1}) - 1/(x_i - t_j)``.

``spectral_solve`` is an independent check.  It expands
``g(t) = sqrt(a**2 - t**2) sum_k c_k U_k(t/a)`` and uses

    fp int_{-a}^{a} sqrt(a**2-t**2) U_k(t/a) / (x-t)**2 dt = -pi (k+1) U_k(x/a),   |x| < a.

Regular kernels are duck-typed.  Any even callable of the separation works;
objects that also provide ``antiderivative(u)`` get exact panel integrals, and
objects with ``symbol(s)`` (``Kr(x) = int_0^inf symbol(s) cos(sx) ds``) get the
spectral block through the Bessel transform

    int_{-1}^{1} sqrt(1-t**2) U_k(t) exp(i w t) dt = pi (k+1) i**k J_{k+1}(w) / w.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, linalg, special

from . import quadrature


class HsieError(RuntimeError):
    pass


class SingularSystemError(HsieError):
    def __init__(self, index: int, pivot: float):
        super().__init__(f"numerically singular system: pivot {index} is {pivot:.3e}")
        self.index = index
        self.pivot = pivot


class OperatorDomainError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    a: float
    n: int

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("half-length must be positive")
        if self.n < 2:
            raise ValueError("need at least two panels")

    @property
    def h(self) -> float:
        return 2.0 * self.a / self.n

    @property
    def nodes(self) -> np.ndarray:
        j = np.arange(self.n + 1)
        # built from both ends so the grid is exactly symmetric
        left = -self.a + j * self.h
        right = self.a - (self.n - j) * self.h
        return np.where(2 * j <= self.n, left, right)

    @property
    def points(self) -> np.ndarray:
        t = self.nodes
        return 0.5 * (t[:-1] + t[1:])


@dataclass(frozen=True)
class HsieProblem:
    a: float
    rhs: Callable
    regular_kernel: Optional[Callable] = None
    meta: dict = field(default_factory=dict, compare=False)

    def rhs_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.rhs(x), dtype=float), x.shape).copy()


@dataclass(frozen=True)
class Solution:
    grid: Grid
    g: np.ndarray
    residual_norm: float
    matrix: np.ndarray = field(repr=False, compare=False, default=None)
    meta: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ChebSolution:
    a: float
    coeffs: np.ndarray
    residual_norm: float = 0.0

    @property
    def m(self) -> int:
        return len(self.coeffs)

    def weighted(self, t):
        """``sum_k c_k U_k(t/a)``, i.e. g divided by ``sqrt(a**2 - t**2)``."""
        xi = np.asarray(t, dtype=float) / self.a
        return sum(c * special.eval_chebyu(k, xi) for k, c in enumerate(self.coeffs))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(np.maximum(self.a**2 - t * t, 0.0)) * self.weighted(t)

    def edge_value(self, side: int = 1) -> float:
        """Limit of ``g / sqrt(a**2 - t**2)`` at ``t = side * a``."""
        k = np.arange(self.m)
        return float(np.sum(self.coeffs * (k + 1) * float(side) ** k))


def _vanishes(kernel) -> bool:
    return kernel is None or getattr(kernel, "vanishes", False)


def _as_vectorized(kernel):
    def f(u):
        u = np.asarray(u, dtype=float)
        return np.broadcast_to(np.asarray(kernel(u), dtype=float), u.shape)
    return f


def _factor(A):
    scale = np.abs(A).max()
    if not scale > 0:
        raise SingularSystemError(0, 0.0)
    with warnings.catch_warnings():
        # exact zero pivots are reported below with their index
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(A, check_finite=True)
    diag = np.abs(np.diag(lu))
    bad = np.nonzero(diag < 1e-13 * scale)[0]
    if bad.size:
        raise SingularSystemError(int(bad[0]), float(diag[bad[0]]))
    return lu, piv


def characteristic_matrix(grid: Grid) -> np.ndarray:
    """Exact finite-part integrals of ``1/(x_i - t)**2`` over each panel."""
    n, h = grid.n, grid.h
    d = np.arange(n)[:, None] - np.arange(n)[None, :]
    return 1.0 / ((d - 0.5) * h) - 1.0 / ((d + 0.5) * h)


def _toeplitz_from_antiderivative(n, h, G):
    # G evaluated at (k + 1/2) h, k = 0..n-1; odd extension to negative offsets
    pos = np.asarray(G((np.arange(n) + 0.5) * h), dtype=float)
    vals = np.concatenate([-pos[::-1], pos])  # offsets (m + 1/2) h, m = -n..n-1
    d = np.arange(n)[:, None] - np.arange(n)[None, :]
    return vals[d + n] - vals[d + n - 1]


def regular_matrix(grid: Grid, regular_kernel) -> np.ndarray:
    """``int_{panel j} Kr(x_i - t) dt`` for all i, j."""
    n, h = grid.n, grid.h
    if _vanishes(regular_kernel):
        return np.zeros((n, n))
    if hasattr(regular_kernel, "antiderivative"):
        return _toeplitz_from_antiderivative(n, h, regular_kernel.antiderivative)
    f = _as_vectorized(regular_kernel)
    # difference kernel on a uniform grid: entry depends on i - j only
    by_offset = np.array([
        quadrature.panel_integral(f, (d - 0.5) * h, (d + 0.5) * h, singular_at=0.0 if d == 0 else None)
        for d in range(-(n - 1), n)
    ])
    d = np.arange(n)[:, None] - np.arange(n)[None, :]
    return by_offset[d + n - 1]


def solve(problem: HsieProblem, n: int) -> Solution:
    if n < 8:
        raise ValueError(f"collocation needs n >= 8, got {n}")
    grid = Grid(problem.a, n)
    A = characteristic_matrix(grid) + regular_matrix(grid, problem.regular_kernel)
    b = problem.rhs_values(grid.points)
    lu, piv = _factor(A)
    g = linalg.lu_solve((lu, piv), b)
    residual = float(np.max(np.abs(A @ g - b)))
    bnorm = float(np.max(np.abs(b)))
    if residual > 1e-10 * bnorm and residual > 1e-300:
        raise HsieError(f"collocation residual {residual:.3e} exceeds tolerance (|b| = {bnorm:.3e})")
    return Solution(grid=grid, g=g, residual_norm=residual, matrix=A, meta=dict(problem.meta))


def _bessel_block(symbol, a, x, m, s_max=2000.0, order=12):
    """``int Kr(x_i - t) sqrt(a**2-t**2) U_k(t/a) dt`` via the cosine symbol of Kr."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    width = min(1.0, 1.0 / a)
    npan = int(math.ceil(s_max / width))
    gx, gw = np.polynomial.legendre.leggauss(order)
    edges = np.arange(npan) * width
    s = (edges[:, None] + 0.5 * width * (gx[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * width * gw, npan)
    k = np.arange(m)
    sa = s * a
    bess = special.jv(k[:, None] + 1, sa[None, :]) / sa[None, :]  # (m, S)
    weight = w * symbol(s)
    phase = s[None, :] * x[:, None]  # (X, S)
    out = np.empty((x.size, m))
    for kk in range(m):
        osc = np.cos(phase - 0.5 * math.pi * kk)
        out[:, kk] = math.pi * (kk + 1) * a * a * (osc @ (weight * bess[kk]))
    return out


def _quad_block(kernel, a, x, m):
    f = _as_vectorized(kernel)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, m))
    for i, xi in enumerate(x):
        pts = [xi] if -a < xi < a else None
        for k in range(m):
            def integrand(t, k=k):
                return float(f(xi - t)) * math.sqrt(max(a * a - t * t, 0.0)) * special.eval_chebyu(k, t / a)
            out[i, k] = integrate.quad(integrand, -a, a, points=pts, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
    return out


def _spectral_regular(kernel, a, x, m):
    if _vanishes(kernel):
        return np.zeros((np.size(x), m))
    if hasattr(kernel, "symbol"):
        return _bessel_block(kernel.symbol, a, x, m)
    return _quad_block(kernel, a, x, m)


def spectral_solve(problem: HsieProblem, m: int) -> ChebSolution:
    if m < 4:
        raise ValueError(f"spectral order must be >= 4, got {m}")
    a = problem.a
    xi = np.cos(np.arange(1, m + 1) * math.pi / (m + 1))  # roots of U_m
    k = np.arange(m)
    A = -math.pi * (k[None, :] + 1) * special.eval_chebyu(k[None, :], xi[:, None])
    A = A + _spectral_regular(problem.regular_kernel, a, a * xi, m)
    b = problem.rhs_values(a * xi)
    lu, piv = _factor(A)
    c = linalg.lu_solve((lu, piv), b)
    return ChebSolution(a=a, coeffs=c, residual_norm=float(np.max(np.abs(A @ c - b))))


def _apply_collocation(solution: Solution, kernel, x: float) -> float:
    t = solution.grid.nodes
    if np.any(np.isclose(x, t, rtol=0.0, atol=1e-14 * solution.grid.a)):
        raise OperatorDomainError(f"x = {x} coincides with a grid node")
    g = solution.g
    char = 1.0 / (x - t[1:]) - 1.0 / (x - t[:-1])
    total = float(g @ char)
    if _vanishes(kernel):
        return total
    if hasattr(kernel, "antiderivative"):
        G = np.asarray(kernel.antiderivative(x - t), dtype=float)
        reg = G[:-1] - G[1:]
    else:
        f = _as_vectorized(kernel)
        reg = np.array([
            quadrature.panel_integral(lambda s: f(x - s), lo, hi, singular_at=x)
            for lo, hi in zip(t[:-1], t[1:])
        ])
    return total + float(g @ reg)


def _apply_spectral(solution: ChebSolution, kernel, x: float) -> float:
    a, c = solution.a, solution.coeffs
    xi = x / a
    k = np.arange(solution.m)
    if abs(xi) < 1.0:
        char = -math.pi * np.sum(c * (k + 1) * special.eval_chebyu(k, xi))
    elif abs(xi) > 1.0:
        ax = abs(xi)
        root = math.sqrt(ax * ax - 1.0)
        w = ax - root
        sign = np.sign(xi) ** k
        char = math.pi * np.sum(sign * c * (k + 1) * w ** (k + 1)) / root
    else:
        raise OperatorDomainError("the operator is singular at the crack tips")
    reg = _spectral_regular(kernel, a, np.array([x]), solution.m)[0]
    return float(char + reg @ c)


def apply_operator(solution, regular_kernel, x):
    """``fp int g(t) [1/(x-t)**2 + Kr(x-t)] dt`` for a discrete or spectral solution."""
    fn = _apply_spectral if isinstance(solution, ChebSolution) else _apply_collocation
    if np.ndim(x) == 0:
        return fn(solution, regular_kernel, float(x))
    return np.array([fn(solution, regular_kernel, float(v)) for v in np.ravel(x)]).reshape(np.shape(x))
