"""Plane-strain crack in a porous medium: opening profile, exterior stress and SCF.

Lengths are in the kernel's intrinsic unit and the load is ``sigma0 / (2 mu)``.
Dividing the crack equation by the characteristic coefficient ``-c0/pi``
leaves a constant right-hand side ``pi * load / (1 - c2)``; the ``(1-N)**2``
factors cancel.  The normalized solution is minus the opening, so openings
are reported with the sign flipped.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import hsie
from .kernel import KernelConfig, RegularKernel
from .material import MaterialParams, derive_groups
from .symbol import SymbolSpec

log = logging.getLogger(__name__)

SCF_AGREEMENT = 0.05
EDGE_SKIP = 4
EDGE_DEGREE = 6
LIMIT_EPS_MAX = 0.5
LIMIT_REACH = 0.5
LIMIT_NEAREST = 3.0
LIMIT_SAMPLES = 20


@dataclass(frozen=True)
class CrackProblem:
    spec: SymbolSpec
    a: float = 1.0
    load: float = 0.5

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"crack half-length must be positive, got {self.a}")
        if not self.load > 0:
            raise ValueError(f"load sigma0/(2 mu) must be positive, got {self.load}")

    @classmethod
    def from_material(cls, params: MaterialParams, a: float, sigma0: float) -> "CrackProblem":
        groups = derive_groups(params)
        return cls(SymbolSpec.from_groups(groups), a=a, load=sigma0 / (2.0 * params.mu))

    @property
    def rhs_value(self) -> float:
        return math.pi * self.load / (1.0 - self.spec.c2)


@dataclass(frozen=True)
class ScfResult:
    """Stress-concentration factor at the right tip.

    ``k`` is per unit applied stress sigma0 (so ``k0 = a``); ``ratio = k/k0``.
    ``route_a`` comes from the exterior-stress limit and ``route_b`` from the
    edge behaviour of the opening, both as ratios.
    """

    k: float
    k0: float
    ratio: float
    route_a: float
    route_b: float
    flagged: bool
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)


def _check_cfg(problem: CrackProblem, cfg: Optional[KernelConfig]) -> KernelConfig:
    if cfg is None:
        return KernelConfig(problem.spec)
    if cfg.spec != problem.spec:
        raise ValueError("kernel configuration and crack problem disagree on (N, c2)")
    return cfg


def assemble(problem: CrackProblem, cfg: Optional[KernelConfig] = None) -> hsie.HsieProblem:
    cfg = _check_cfg(problem, cfg)
    value = problem.rhs_value
    return hsie.HsieProblem(
        a=problem.a,
        rhs=lambda x: np.full(np.shape(x), value),
        regular_kernel=RegularKernel(cfg),
        meta={"rhs_scale": value, "load": problem.load},
    )


def as_opening(raw: hsie.Solution) -> hsie.Solution:
    meta = dict(raw.meta, sign_flipped=True)
    return dataclasses.replace(raw, g=-raw.g, meta=meta)


def crack_opening(problem: CrackProblem, cfg: Optional[KernelConfig] = None, n: int = 400) -> hsie.Solution:
    if n < 50:
        raise ValueError(f"crack solves need n >= 50, got {n}")
    return as_opening(hsie.solve(assemble(problem, cfg), n))


def spectral_opening(problem: CrackProblem, cfg: Optional[KernelConfig] = None, m: int = 32) -> hsie.ChebSolution:
    raw = hsie.spectral_solve(assemble(problem, cfg), m)
    return dataclasses.replace(raw, coeffs=-raw.coeffs)


def center_value(solution: hsie.Solution) -> float:
    """Opening at ``t = 0``.

    For even ``n`` the centre is a node; the four nearest midpoint values are
    combined with cubic interpolation weights (-1, 9, 9, -1)/16 so that the
    interpolation error is O(h**4) and does not mask the discretization error.
    """
    g, n = solution.g, solution.grid.n
    c = n // 2
    if n % 2:
        return float(g[c])
    return float((9.0 * (g[c - 1] + g[c]) - (g[c - 2] + g[c + 1])) / 16.0)


def _stress_scale(problem: CrackProblem) -> float:
    # sigma_yy / sigma0 per unit of the normalized operator applied to the opening
    return (1.0 - problem.spec.c2) / (math.pi * problem.load)


def stress_outside(solution, problem: CrackProblem, cfg: Optional[KernelConfig], x) -> float:
    """``sigma_yy(x, 0) / sigma0`` ahead of the crack (``|x| > a``)."""
    cfg = _check_cfg(problem, cfg)
    if np.any(np.abs(np.asarray(x)) <= problem.a):
        raise hsie.OperatorDomainError("stress_outside needs |x| > a")
    value = hsie.apply_operator(solution, RegularKernel(cfg), x)
    return _stress_scale(problem) * value


def _limit_route(solution, problem):
    a, h = problem.a, solution.grid.h
    eps_min = LIMIT_NEAREST * h / a
    # the expansion in sqrt(eps) converges within about one kernel length of the tip
    eps_max = max(min(LIMIT_EPS_MAX, LIMIT_REACH / a), 4.0 * eps_min)
    k = np.unique(np.round(np.geomspace(eps_min, eps_max, LIMIT_SAMPLES) * a / h - 0.5))
    x = a + (k + 0.5) * h
    eps = (x - a) / a
    # the regular part of the exterior stress is bounded at the tip and drops out of the limit
    sigma = _stress_scale(problem) * hsie.apply_operator(solution, None, x)
    scaled = sigma * np.sqrt(x * x - a * a) / a
    root = np.sqrt(eps)
    # polynomial in sqrt(eps) plus the 1/eps far field of the discrete null-space component
    basis = np.stack([root**p for p in range(5)] + [1.0 / eps], axis=1)
    coef, *_ = np.linalg.lstsq(basis, scaled, rcond=None)
    fit_residual = float(np.max(np.abs(basis @ coef - scaled)))
    return float(coef[0]), {"eps": eps, "samples": scaled, "fit": coef, "fit_residual": fit_residual}


def _edge_route(solution, problem):
    a = problem.a
    x = solution.grid.points
    n = x.size
    from_tip = np.minimum(np.arange(n), np.arange(n)[::-1])
    keep = from_tip >= EDGE_SKIP
    w = np.sqrt(a * a - x * x)
    leg = np.polynomial.legendre.legvander(x / a, EDGE_DEGREE)
    # 1/w and x/w: the O(h) component the finite-part operator cannot see inside the crack
    basis = np.column_stack([w[:, None] * leg, 1.0 / w, (x / a) / w])
    coef, *_ = np.linalg.lstsq(basis[keep], solution.g[keep], rcond=None)
    ends = np.polynomial.legendre.legvander(np.array([1.0, -1.0]), EDGE_DEGREE) @ coef[: EDGE_DEGREE + 1]
    scale = (1.0 - problem.spec.c2) / problem.load
    right, left = scale * ends
    return float(right), {"edge_coefficient": float(ends[0] * math.sqrt(2 * a)), "left_ratio": float(left),
                          "nullspace": coef[EDGE_DEGREE + 1:]}


def scf(solution: hsie.Solution, problem: CrackProblem, cfg: Optional[KernelConfig] = None) -> ScfResult:
    """SCF of a collocation opening (sign convention: opening >= 0).

    Route A fits ``sigma_yy sqrt(x**2 - a**2)`` ahead of the tip and
    extrapolates to the tip; route B reads the coefficient ``C`` of
    ``g ~ C sqrt(a - t)`` off a weighted fit of the opening, using
    ``k = sigma0 (1 - c2) C sqrt(2a) / (2 load)``.  Disagreement beyond 5%
    flags the result.
    """
    cfg = _check_cfg(problem, cfg)
    route_a, diag_a = _limit_route(solution, problem)
    route_b, diag_b = _edge_route(solution, problem)
    gap = abs(route_a - route_b) / abs(route_b)
    flagged = bool(gap > SCF_AGREEMENT)
    if flagged:
        log.warning("SCF routes disagree by %.2f%% (A=%.6g, B=%.6g)", 100 * gap, route_a, route_b)
    ratio = route_b
    diagnostics = {"route_gap": gap, "limit": diag_a, "edge": diag_b, "n": solution.grid.n,
                   "residual_norm": solution.residual_norm}
    return ScfResult(k=ratio * problem.a, k0=problem.a, ratio=ratio, route_a=route_a, route_b=route_b,
                     flagged=flagged, diagnostics=diagnostics)


def spectral_ratio(solution: hsie.ChebSolution, problem: CrackProblem) -> float:
    """k/k0 from a spectral opening (edge value of its weighted expansion)."""
    return (1.0 - problem.spec.c2) * solution.edge_value(+1) / problem.load


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    k: float
    ratio: float
    route_a: float
    route_b: float
    flagged: bool
    n: int
    residual_norm: float


AXES = ("N", "c2", "a")


class SweepError(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"sweep value #{index} rejected: {reason}")
        self.index = index


def _point(base: CrackProblem, axis: str, value: float) -> CrackProblem:
    if axis == "N":
        return dataclasses.replace(base, spec=SymbolSpec(base.spec.c2, value))
    if axis == "c2":
        return dataclasses.replace(base, spec=SymbolSpec(value, base.spec.N))
    return dataclasses.replace(base, a=value)


def _solve_point(args):
    problem, cfg, axis, value, n = args
    sol = crack_opening(problem, cfg, n)
    res = scf(sol, problem, cfg)
    return SweepRow(axis, value, res.k, res.ratio, res.route_a, res.route_b, res.flagged, n, sol.residual_norm)


def sweep(base: CrackProblem, cfg: Optional[KernelConfig], axis: str, values: Sequence[float], n: int = 400,
          workers: int = 1) -> list[SweepRow]:
    """Independent solves along one parameter axis, returned in input order."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    cfg = _check_cfg(base, cfg)
    jobs = []
    for i, v in enumerate(values):
        try:
            problem = _point(base, axis, float(v))
            if problem.a * 2 > 50:
                raise ValueError("half-length too large for the kernel range")
        except ValueError as exc:
            raise SweepError(i, str(exc)) from None
        jobs.append((problem, dataclasses.replace(cfg, spec=problem.spec), axis, float(v), n))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_solve_point, jobs))
    return [_solve_point(job) for job in jobs]
