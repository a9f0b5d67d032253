"""Material constants of an elastic solid with voids and the derived plane-strain groups.

The plane-strain system is written in terms of the dimensionless numbers
``c2 = mu / (lambda + 2 mu)`` and ``H = beta / (lambda + 2 mu)`` and the
lengths ``l1 = sqrt(alpha / beta)`` and ``l2 = sqrt(alpha / xi)``.  Only the
coupling number ``N = (l2 / l1)**2 * H`` and ``c2`` reach the crack kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


class MaterialError(ValueError):
    """Raised for inadmissible material constants."""


@dataclass(frozen=True)
class MaterialParams:
    """Physical constants (any consistent unit system).

    ``b`` and ``m`` couple the temperature field and are only needed for
    thermoelastic runs; they must be given together.
    """

    lam: float
    mu: float
    alpha: float
    beta: float
    xi: float
    b: Optional[float] = None
    m: Optional[float] = None

    @property
    def thermal(self) -> bool:
        return self.b is not None


@dataclass(frozen=True)
class DimensionlessGroups:
    c2: float
    H: float
    N: float
    l1: Optional[float]
    l2: float
    B: Optional[float] = None
    l3: Optional[float] = None

    @property
    def thermal(self) -> bool:
        return self.B is not None


@dataclass(frozen=True)
class PlaneStrainState:
    """Local state at a point: ``grad_u[i][j] = d u_i / d x_j``, ``phi`` and optional ``theta``."""

    grad_u: np.ndarray
    phi: float = 0.0
    theta: Optional[float] = None

    def __post_init__(self):
        g = np.asarray(self.grad_u, dtype=float)
        if g.shape != (2, 2):
            raise ValueError("grad_u must be 2x2")
        if not (np.all(np.isfinite(g)) and math.isfinite(self.phi)):
            raise ValueError("state entries must be finite")
        if self.theta is not None and not math.isfinite(self.theta):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "grad_u", g)


def coupling_number(params: MaterialParams) -> float:
    """N in closed form, ``beta**2 / (xi (lambda + 2 mu))``."""
    return params.beta**2 / (params.xi * (params.lam + 2.0 * params.mu))


def derive_groups(params: MaterialParams) -> DimensionlessGroups:
    p = params
    if not p.mu > 0:
        raise MaterialError(f"shear modulus must be positive (mu={p.mu})")
    stiff = p.lam + 2.0 * p.mu
    if not stiff > 0:
        raise MaterialError(f"lambda + 2 mu must be positive (got {stiff})")
    if not p.lam + p.mu > 0:
        raise MaterialError(f"lambda + mu must be positive for 0 < c2 < 1 (got {p.lam + p.mu})")
    if not p.alpha > 0:
        raise MaterialError(f"alpha must be positive (alpha={p.alpha})")
    if not p.xi > 0:
        raise MaterialError(f"xi must be positive (xi={p.xi})")
    if p.beta < 0:
        raise MaterialError(f"beta must be non-negative (beta={p.beta})")
    if (p.b is None) != (p.m is None):
        raise MaterialError("thermal constants b and m must be given together")

    c2 = p.mu / stiff
    H = p.beta / stiff
    l2sq = p.alpha / p.xi
    if p.beta > 0:
        l1sq = p.alpha / p.beta
        N = (l2sq / l1sq) * H
        l1 = math.sqrt(l1sq)
    else:
        # uncoupled: porosity field decouples, l1 is undefined
        N = 0.0
        l1 = None
    if not 0.0 <= N < 1.0:
        raise MaterialError(f"coupling number out of range: N={N:.6g} (need 0 <= N < 1)")

    B = l3 = None
    if p.b is not None:
        if not p.m > 0:
            raise MaterialError(f"m must be positive (m={p.m})")
        B = p.b / stiff
        l3 = math.sqrt(p.alpha / p.m)
    return DimensionlessGroups(c2=c2, H=H, N=N, l1=l1, l2=math.sqrt(l2sq), B=B, l3=l3)


def stress_plane_strain(state: PlaneStrainState, groups: DimensionlessGroups):
    """Normalized stresses ``(sxx/(lam+2mu), syy/(lam+2mu), sxy/mu)``.

    With a temperature in the state the normal stresses carry the extra
    ``-B theta`` term.
    """
    (ux_x, ux_y), (uy_x, uy_y) = state.grad_u
    lat = 1.0 - 2.0 * groups.c2
    iso = groups.H * state.phi
    if state.theta is not None:
        if groups.B is None:
            raise MaterialError("state carries theta but the groups have no thermal constant B")
        iso = iso - groups.B * state.theta
    sxx = ux_x + lat * uy_y + iso
    syy = lat * ux_x + uy_y + iso
    sxy = ux_y + uy_x
    return sxx, syy, sxy


def _exact_step(h: float) -> float:
    # power of two, so x0 + k*h is exact for moderate |x0|
    return 2.0 ** round(math.log2(h))


def pde_residual(
    field: Callable[[float, float], Sequence[float]],
    point: tuple[float, float],
    groups: DimensionlessGroups,
    h: float = 1e-4,
) -> tuple[float, ...]:
    """Left-hand sides of the plane-strain field equations at ``point``.

    ``field(x, y)`` returns ``(ux, uy, phi)`` or ``(ux, uy, phi, theta)``.
    Derivatives are second-order central differences; the step is rounded
    to the nearest power of two.  Returns three residuals, or four when the
    field carries a temperature (the last being the Laplacian of theta).

    For ``beta = 0`` the third equation cannot be divided by beta and is
    returned scaled by ``1/xi`` instead: ``l2**2 Lap(phi) - phi``.
    """
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    h = _exact_step(h)
    x0, y0 = point
    samples = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            samples[i, j] = np.asarray(field(x0 + i * h, y0 + j * h), dtype=float)
    f0 = samples[0, 0]
    thermal = f0.size == 4
    if thermal and groups.B is None:
        raise MaterialError("field carries theta but the groups have no thermal constant B")

    d_x = (samples[1, 0] - samples[-1, 0]) / (2 * h)
    d_y = (samples[0, 1] - samples[0, -1]) / (2 * h)
    d_xx = (samples[1, 0] - 2 * f0 + samples[-1, 0]) / h**2
    d_yy = (samples[0, 1] - 2 * f0 + samples[0, -1]) / h**2
    d_xy = (samples[1, 1] - samples[1, -1] - samples[-1, 1] + samples[-1, -1]) / (4 * h * h)

    c2, H = groups.c2, groups.H
    UX, UY, PHI, TH = 0, 1, 2, 3
    r1 = d_xx[UX] + c2 * d_yy[UX] + (1 - c2) * d_xy[UY] + H * d_x[PHI]
    r2 = d_yy[UY] + c2 * d_xx[UY] + (1 - c2) * d_xy[UX] + H * d_y[PHI]
    div = d_x[UX] + d_y[UY]
    lap_phi = d_xx[PHI] + d_yy[PHI]
    if groups.l1 is not None:
        l1sq = groups.l1**2
        r3 = l1sq * lap_phi - (l1sq / groups.l2**2) * f0[PHI] - div
    else:
        r3 = groups.l2**2 * lap_phi - f0[PHI]
    if not thermal:
        return float(r1), float(r2), float(r3)

    B = groups.B
    r1 -= B * d_x[TH]
    r2 -= B * d_y[TH]
    if groups.l1 is not None:
        r3 += (groups.l1**2 / groups.l3**2) * f0[TH]
    else:
        r3 += (groups.l2**2 / groups.l3**2) * f0[TH]
    r4 = d_xx[TH] + d_yy[TH]
    return float(r1), float(r2), float(r3), float(r4)
