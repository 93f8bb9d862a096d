"""wicklab: a desk-scale phase-space laboratory in one dimension.

Coherent-state symbol calculus (Weyl and Wick), Gaussian smoothing of
operators, mean-field quantum and classical propagators, and the sweep
experiments that measure their semiclassical convergence rates.
"""

from .grids import ALIAS_GUARD, AliasError, GridError, PhaseGrid, PhasePoint, PositionGrid
from .states import (
    BoundaryError,
    WaveFunction,
    coherent_overlap,
    coherent_state,
    heisenberg_translate,
    resolution_of_identity,
    symmetry_apply,
)
from .symbols import PhaseDistribution, Symbol, heat_smooth, l1_distance, wirtinger

__all__ = [
    "ALIAS_GUARD",
    "AliasError",
    "BoundaryError",
    "GridError",
    "PhaseDistribution",
    "PhaseGrid",
    "PhasePoint",
    "PositionGrid",
    "Symbol",
    "WaveFunction",
    "coherent_overlap",
    "coherent_state",
    "heat_smooth",
    "heisenberg_translate",
    "l1_distance",
    "resolution_of_identity",
    "symmetry_apply",
    "wirtinger",
]

__version__ = "0.1.0"
