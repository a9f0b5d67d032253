"""Crack under mechanical load plus a prescribed normal heat flux on its faces.

The temperature is harmonic in the half-plane with Neumann data ``f0`` on
``|x| < a`` and zero flux elsewhere on ``y = 0``; its trace on the crack line is

    theta(x, 0) = -(1/pi) int_{-a}^{a} f0(xi) ln|x - xi| dxi + const.

A net flux makes theta grow logarithmically at infinity, so the constant is
fixed by ``theta(0, 0) = 0`` and a warning is issued.  The trace enters the
crack equation through the ``-B theta`` term of the normal stress; the kernel
is left unchanged.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import crack, hsie
from .crack import CrackProblem, ScfResult
from .kernel import KernelConfig


class ThermoConfigError(ValueError):
    pass


class NetFluxWarning(UserWarning):
    """The prescribed flux has a nonzero integral; theta is defined up to a constant."""


@dataclass(frozen=True)
class FluxProfile:
    f0: Callable[[float], float]
    a: float
    label: str = "custom"
    constant_value: Optional[float] = None

    @classmethod
    def constant(cls, value: float, a: float) -> "FluxProfile":
        value = float(value)
        return cls(lambda x: value + 0.0 * np.asarray(x, dtype=float), a, f"constant:{value:g}", value)

    @classmethod
    def from_samples(cls, xi, values, a: float, label: str = "table") -> "FluxProfile":
        """Piecewise-linear flux through ``(xi, values)``; the table must cover ``[-a, a]``."""
        xi = np.asarray(xi, dtype=float)
        values = np.asarray(values, dtype=float)
        order = np.argsort(xi)
        xi, values = xi[order], values[order]
        if xi.size < 2 or xi[0] > -a or xi[-1] < a:
            raise ValueError(f"flux table must span [-{a}, {a}]")
        return cls(lambda x: np.interp(x, xi, values), a, label)

    @classmethod
    def from_csv(cls, path, a: float) -> "FluxProfile":
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
        if data.shape[1] != 2:
            raise ValueError("flux CSV needs exactly two columns: xi, f0")
        return cls.from_samples(data[:, 0], data[:, 1], a, label=str(path))

    @property
    def is_zero(self) -> bool:
        return self.constant_value == 0.0

    def net_flux(self) -> float:
        if self.constant_value is not None:
            return 2.0 * self.a * self.constant_value
        return integrate.quad(lambda t: float(self.f0(t)), -self.a, self.a, limit=200)[0]


def _scalar(f):
    return lambda t: float(f(t))


def _log_potential(flux: FluxProfile, x: float, tol: float) -> float:
    """``int f0(xi) ln|x - xi| dxi`` over the crack."""
    a, f = flux.a, _scalar(flux.f0)
    opts = dict(epsabs=1e-3 * tol, epsrel=tol, limit=400)
    if -a < x < a:
        right = integrate.quad(f, x, a, weight="alg-loga", wvar=(0.0, 0.0), **opts)[0]
        left = integrate.quad(f, -a, x, weight="alg-logb", wvar=(0.0, 0.0), **opts)[0]
        return left + right
    if x == a or x == -a:
        weight = "alg-logb" if x == a else "alg-loga"
        return integrate.quad(f, -a, a, weight=weight, wvar=(0.0, 0.0), **opts)[0]
    return integrate.quad(lambda t: f(t) * math.log(abs(x - t)), -a, a, **opts)[0]


def raw_trace(flux: FluxProfile, x, tol: float = 1e-12):
    """``-(1/pi) int f0(xi) ln|x - xi| dxi`` without the additive normalization."""
    if flux.is_zero:
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
    if np.ndim(x) == 0:
        return -_log_potential(flux, float(x), tol) / math.pi
    return np.array([-_log_potential(flux, float(v), tol) / math.pi for v in np.ravel(x)]).reshape(np.shape(x))


def theta_trace(flux: FluxProfile, x, tol: float = 1e-12):
    """Temperature on the crack line, normalized so that ``theta(0, 0) = 0``."""
    if flux.is_zero:
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
    if abs(flux.net_flux()) > 1e-12 * max(1.0, flux.a):
        warnings.warn("nonzero net flux: theta grows logarithmically at infinity; "
                      "reporting theta(x, 0) - theta(0, 0)", NetFluxWarning, stacklevel=2)
    return raw_trace(flux, x, tol) - raw_trace(flux, 0.0, tol)


def theta_field(flux: FluxProfile, x: float, y: float, tol: float = 1e-13) -> float:
    """Half-plane temperature (without normalization) at ``(x, y)``, ``y != 0``."""
    if y == 0.0:
        return float(raw_trace(flux, x, tol))
    f = _scalar(flux.f0)
    val = integrate.quad(lambda t: f(t) * 0.5 * math.log((x - t) ** 2 + y * y), -flux.a, flux.a,
                         epsabs=1e-3 * tol, epsrel=tol, limit=400)[0]
    return -val / math.pi


@dataclass(frozen=True)
class ThermoCrackProblem:
    base: CrackProblem
    flux: FluxProfile
    B: Optional[float]
    l3: Optional[float] = None

    @classmethod
    def from_groups(cls, base: CrackProblem, groups, flux: FluxProfile) -> "ThermoCrackProblem":
        return cls(base, flux, groups.B, groups.l3)

    def __post_init__(self):
        if abs(self.flux.a - self.base.a) > 1e-12 * self.base.a:
            raise ThermoConfigError("flux profile and crack disagree on the half-length")

    @property
    def kappa(self) -> float:
        """``(lambda + 2 mu) / (2 mu)``: carries ``B theta`` into the ``sigma0/(2 mu)`` scale."""
        return 1.0 / (2.0 * self.base.spec.c2)


def _require_B(problem: ThermoCrackProblem) -> float:
    if problem.B is None:
        raise ThermoConfigError("thermoelastic run needs the constant B (give b and m)")
    return problem.B


def thermal_rhs_term(problem: ThermoCrackProblem, x):
    """Contribution of the temperature trace to the normalized right-hand side."""
    B = _require_B(problem)
    scale = math.pi * problem.kappa * B / (1.0 - problem.base.spec.c2)
    return scale * np.asarray(theta_trace(problem.flux, x))


def _trivial(problem: ThermoCrackProblem) -> bool:
    return problem.B == 0.0 or problem.flux.is_zero


def thermo_rhs(problem: ThermoCrackProblem, cfg: Optional[KernelConfig] = None) -> hsie.HsieProblem:
    B = _require_B(problem)
    elastic = crack.assemble(problem.base, cfg)
    if _trivial(problem):
        return elastic
    base = problem.base
    kappa, c2 = problem.kappa, base.spec.c2
    flux = problem.flux

    def rhs(x):
        theta = np.asarray(theta_trace(flux, x), dtype=float)
        return math.pi * (base.load + kappa * B * theta) / (1.0 - c2)

    meta = dict(elastic.meta, thermal=True, kappa=kappa, B=B, flux=flux.label)
    return dataclasses.replace(elastic, rhs=rhs, meta=meta)


def thermal_only(problem: ThermoCrackProblem, cfg: Optional[KernelConfig] = None) -> hsie.HsieProblem:
    """The problem with the mechanical load removed (for superposition)."""
    elastic = crack.assemble(problem.base, cfg)
    return dataclasses.replace(elastic, rhs=lambda x: thermal_rhs_term(problem, x),
                               meta=dict(elastic.meta, load=0.0, thermal=True))


def thermo_scf(problem: ThermoCrackProblem, cfg: Optional[KernelConfig] = None, n: int = 400) -> ScfResult:
    hp = thermo_rhs(problem, cfg)
    opening = crack.as_opening(hsie.solve(hp, n))
    result = crack.scf(opening, problem.base, cfg)
    info = {"thermal": not _trivial(problem), "kappa": problem.kappa, "B": problem.B,
            "flux": problem.flux.label, "kernel_modified": False}
    return dataclasses.replace(result, diagnostics=dict(result.diagnostics, thermal=info))
