"""Spectral expansions of polyharmonic type on periodic grids.

Partial integrals ``E_lam f`` and their imaginary-order Riesz means, exact
maximal functions over lattice breakpoints, the dyadic radial partition of
unity, localized multipliers, and end-to-end localization audits.
"""

__version__ = "0.1.0"

from .field_core import (
    FieldError,
    GridSpec,
    SpatialField,
    SpectralField,
    forward_transform,
    inverse_transform,
    restricted_l2_norm,
)
from .symbols import SymbolParams, apply_multiplier, evaluate_symbol
from .expansion import LambdaSchedule, convergence_profile, maximal_function, partial_integral
from .decomposition import CutoffFamily, phi, psi, psi_hat_profile, psi_j
from .multiplier_lab import compute_multiplier

__all__ = [
    "FieldError",
    "GridSpec",
    "SpatialField",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "restricted_l2_norm",
    "SymbolParams",
    "apply_multiplier",
    "evaluate_symbol",
    "LambdaSchedule",
    "partial_integral",
    "maximal_function",
    "convergence_profile",
    "CutoffFamily",
    "phi",
    "psi",
    "psi_j",
    "psi_hat_profile",
    "compute_multiplier",
]
