"""Plane-strain cracks in porous elastic media with voids.

Submodules: ``material`` (constants and field equations), ``symbol`` (Fourier
symbol of the crack kernel), ``kernel`` (kernel evaluation), ``hsie``
(hypersingular equation solvers), ``crack`` (openings and SCF), ``thermo``
(prescribed heat flux) and ``cli``.
"""

from .crack import CrackProblem, ScfResult, crack_opening, scf, spectral_opening, sweep
from .kernel import KernelConfig
from .material import DimensionlessGroups, MaterialParams, derive_groups
from .symbol import SymbolSpec

__all__ = [
    "CrackProblem", "DimensionlessGroups", "KernelConfig", "MaterialParams", "ScfResult", "SymbolSpec",
    "crack_opening", "derive_groups", "scf", "spectral_opening", "sweep",
]
__version__ = "0.1.0"
