"""Physical crack kernel and its regular remainder.

The kernel is the cosine transform ``K(x) = (1/pi) int_0^inf L(s) cos(sx) ds``.
Its linear growth ``c0 s`` transforms (as a finite part) into ``-c0/(pi x**2)``,
so after dividing by ``-c0/pi`` the kernel reads ``1/x**2 + Kr(x)`` with

    Kr(x) = -(1/c0) int_0^inf [L(s) - c0 s] cos(sx) ds.

``L(s) - c0 s`` decays only like ``c1/s``.  With ``tail_order=2`` the term
``c1 s/(s**2+1)`` is removed as well and its transform added back in closed
form through exponential integrals::

    int_0^inf s cos(sx)/(s**2+1) ds = -(exp(-x) Ei(x) - exp(x) E1(x)) / 2
    int_0^inf sin(sx)/(s**2+1) ds   =  (exp(-x) Ei(x) + exp(x) E1(x)) / 2

The second line is the antiderivative of the first and feeds the exact
panel integrals ``int Kr = G(u1) - G(u0)`` used by the collocation matrices.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import quadrature
from .symbol import SymbolSpec, asymptote_c0, asymptote_c1, remainder, remainder_over_s

X_MAX = 100.0


class KernelDomainError(ValueError):
    pass


@dataclass(frozen=True)
class KernelConfig:
    spec: SymbolSpec
    s_cut: float = 200.0
    panel_tol: float = 1e-10
    tail_order: int = 2

    def __post_init__(self):
        if not self.s_cut > 10:
            raise ValueError(f"s_cut must exceed 10, got {self.s_cut}")
        if not 0 < self.panel_tol < 1e-4:
            raise ValueError(f"panel_tol must lie in (0, 1e-4), got {self.panel_tol}")
        if self.tail_order not in (1, 2):
            raise ValueError("tail_order must be 1 or 2")

    def refined(self) -> "KernelConfig":
        """Same kernel with doubled cutoff and halved tolerance."""
        return KernelConfig(self.spec, 2 * self.s_cut, 0.5 * self.panel_tol, self.tail_order)


def characteristic_coefficient(spec: SymbolSpec) -> float:
    """Coefficient of ``1/x**2`` in K(x) as x -> 0."""
    return -asymptote_c0(spec) / math.pi


def _tail_cos(x):
    return -0.5 * (math.exp(-x) * special.expi(x) - math.exp(x) * special.exp1(x))


def _tail_sin(x):
    return 0.5 * (math.exp(-x) * special.expi(x) + math.exp(x) * special.exp1(x))


def _fourier(f, x, weight, cfg):
    """``int_0^inf f(s) weight(s x) ds``: QAWO up to s_cut, QAWF beyond."""
    tol = cfg.panel_tol
    head, _ = integrate.quad(f, 0.0, cfg.s_cut, weight=weight, wvar=x,
                             epsabs=1e-4 * tol, epsrel=tol, limit=2000)
    if x * cfg.s_cut < 1e-3:
        # one period of the weight spans the whole O(1/s**3) tail: use its leading Taylor term
        lead = (lambda s: f(s)) if weight == "cos" else (lambda s: x * s * f(s))
        tail, _ = integrate.quad(lead, cfg.s_cut, np.inf, epsabs=1e-4 * tol, epsrel=tol, limit=200)
    else:
        tail, _ = integrate.quad(f, cfg.s_cut, np.inf, weight=weight, wvar=x,
                                 epsabs=1e-4 * tol, limlst=200)
    return head + tail


def _snap(x: float) -> float:
    # memo key: rounding to 13 significant digits merges separations that differ by roundoff
    return float(f"{x:.13g}")


def _check_x(x):
    ax = abs(x)
    if ax == 0.0:
        raise KernelDomainError("regular kernel is logarithmically singular at x = 0")
    if ax > X_MAX:
        raise KernelDomainError(f"|x| = {ax} exceeds the supported range {X_MAX}")
    return ax


@functools.lru_cache(maxsize=1 << 16)
def _regular_value(cfg: KernelConfig, ax: float) -> float:
    spec = cfg.spec
    if spec.N == 0.0:
        return 0.0
    c0, c1 = asymptote_c0(spec), asymptote_c1(spec)
    if cfg.tail_order == 2:
        def body(s):
            return remainder(spec, s) - c1 * s / (s * s + 1.0)
        value = _fourier(body, ax, "cos", cfg) + c1 * _tail_cos(ax)
    else:
        value = _fourier(lambda s: remainder(spec, s), ax, "cos", cfg)
    return -value / c0


@functools.lru_cache(maxsize=1 << 16)
def _antiderivative_value(cfg: KernelConfig, au: float) -> float:
    spec = cfg.spec
    if spec.N == 0.0 or au == 0.0:
        return 0.0
    c0, c1 = asymptote_c0(spec), asymptote_c1(spec)
    if cfg.tail_order == 2:
        def body(s):
            return remainder_over_s(spec, s) - c1 / (s * s + 1.0)
        value = _fourier(body, au, "sin", cfg) + c1 * _tail_sin(au)
    else:
        value = _fourier(lambda s: remainder_over_s(spec, s), au, "sin", cfg)
    return -value / c0


def regular_kernel(cfg: KernelConfig, x):
    """Regular remainder ``Kr(x)`` of the normalized kernel (even in x).

    Accepts a scalar or an array; ``x = 0`` raises KernelDomainError.
    """
    if np.ndim(x) == 0:
        return _regular_value(cfg, _snap(_check_x(float(x))))
    arr = np.asarray(x, dtype=float)
    return np.array([_regular_value(cfg, _snap(_check_x(v))) for v in arr.ravel()]).reshape(arr.shape)


def regular_antiderivative(cfg: KernelConfig, u):
    """``G(u) = int_0^u Kr(v) dv`` (odd in u, finite at 0)."""
    def one(v):
        if abs(v) > 2 * X_MAX:
            raise KernelDomainError(f"|u| = {abs(v)} out of range")
        val = _antiderivative_value(cfg, _snap(abs(v)))
        return -val if v < 0 else val
    if np.ndim(u) == 0:
        return one(float(u))
    arr = np.asarray(u, dtype=float)
    return np.array([one(v) for v in arr.ravel()]).reshape(arr.shape)


def full_kernel(cfg: KernelConfig, x):
    """``K(x) = (-c0/pi) (1/x**2 + Kr(x))``."""
    coef = characteristic_coefficient(cfg.spec)
    xs = np.asarray(x, dtype=float)
    return coef * (1.0 / xs**2 + regular_kernel(cfg, x))


def panel_integrals(cfg: KernelConfig, grid, x_i: float, method: str = "antiderivative"):
    """``int_{panel j} Kr(x_i - t) dt`` for every panel of ``grid``.

    ``method="antiderivative"`` differences the exact antiderivative at the
    nodes; ``method="adaptive"`` integrates point values on Gauss panels,
    refined dyadically toward ``t = x_i``.
    """
    nodes = grid.nodes
    if method == "antiderivative":
        G = regular_antiderivative(cfg, x_i - nodes)
        return G[:-1] - G[1:]
    if method == "adaptive":
        def f(t):
            return regular_kernel(cfg, x_i - np.asarray(t))
        tol = max(cfg.panel_tol, 1e-12)
        return np.array([
            quadrature.panel_integral(f, lo, hi, singular_at=x_i, tol=tol)
            for lo, hi in zip(nodes[:-1], nodes[1:])
        ])
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class RegularKernel:
    """Regular part of the normalized crack kernel, as consumed by :mod:`voidcrack.hsie`.

    Besides point values it exposes the exact antiderivative (used for panel
    integrals) and its cosine symbol ``rho(s)`` with
    ``Kr(x) = int_0^inf rho(s) cos(sx) ds``.
    """

    cfg: KernelConfig

    def __call__(self, x):
        return regular_kernel(self.cfg, x)

    def antiderivative(self, u):
        return regular_antiderivative(self.cfg, u)

    def symbol(self, s):
        return -remainder(self.cfg.spec, s) / asymptote_c0(self.cfg.spec)

    @property
    def vanishes(self) -> bool:
        return self.cfg.spec.N == 0.0
