"""Fourier symbol of the porous plane-strain crack kernel.

    q(s) = sqrt(s**2 + 1 - N)
    L(s) = s/q * [2 N c2 s**2 (q - s) + (1 - N)(1 - N - c2) q]

For large s, ``L(s) = c0 s + c1 / s + O(s**-3)`` with

    c0 = (1 - N)**2 (1 - c2)
    c1 = -3/4 N c2 (1 - N)**2

All evaluations write ``q - s`` as ``(1 - N)/(q + s)`` so nothing cancels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SymbolSpec:
    c2: float
    N: float

    def __post_init__(self):
        if not 0.0 < self.c2 < 1.0:
            raise ValueError(f"c2 must lie in (0, 1), got {self.c2}")
        if not 0.0 <= self.N < 1.0:
            raise ValueError(f"coupling number out of range: N={self.N} (need 0 <= N < 1)")

    @classmethod
    def from_groups(cls, groups) -> "SymbolSpec":
        return cls(c2=groups.c2, N=groups.N)

    @property
    def eps(self) -> float:
        return 1.0 - self.N


def q(spec: SymbolSpec, s):
    s = np.asarray(s, dtype=float)
    return np.sqrt(s * s + spec.eps)


def q_minus_s(spec: SymbolSpec, s):
    s = np.asarray(s, dtype=float)
    return spec.eps / (q(spec, s) + s)


def L(spec: SymbolSpec, s):
    s = np.asarray(s, dtype=float)
    e, c2, N = spec.eps, spec.c2, spec.N
    qs = q(spec, s)
    return s / qs * (2 * N * c2 * s * s * q_minus_s(spec, s) + e * (e - c2) * qs)


def asymptote_c0(spec: SymbolSpec) -> float:
    return spec.eps**2 * (1.0 - spec.c2)


def asymptote_c1(spec: SymbolSpec) -> float:
    return -0.75 * spec.N * spec.c2 * spec.eps**2


def remainder(spec: SymbolSpec, s):
    """``L(s) - c0 s`` in cancellation-free form.

    Equals ``-N c2 (1-N)**2 s (2s + q) / (q (q + s)**2)``; behaves as ``c1/s``
    at infinity and vanishes identically when ``N = 0``.
    """
    s = np.asarray(s, dtype=float)
    return s * remainder_over_s(spec, s)


def remainder_over_s(spec: SymbolSpec, s):
    s = np.asarray(s, dtype=float)
    qs = q(spec, s)
    return -spec.N * spec.c2 * spec.eps**2 * (2 * s + qs) / (qs * (qs + s) ** 2)
