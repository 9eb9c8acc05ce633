"""Resonances and eigenvalue perturbation, simple and at exceptional points."""

from .eigen import (
    EigenPair,
    PerturbationResult,
    Spectrum,
    eigenpairs,
    match_to_reference,
    principal_sqrt,
    resonances,
    simple_perturbation,
)
from .exceptional import (
    ExceptionalPointResult,
    GainLossParameterization,
    antisymmetric_profile,
    bracket_exceptional_point,
    find_exceptional_point,
    relative_gap,
)
from .jordan import JordanChain, ep_perturbation, jordan_chain
from .sweep import ShiftRow, ShiftSweep, shift_sweep

__all__ = [
    "EigenPair",
    "PerturbationResult",
    "Spectrum",
    "eigenpairs",
    "match_to_reference",
    "principal_sqrt",
    "resonances",
    "simple_perturbation",
    "ExceptionalPointResult",
    "GainLossParameterization",
    "antisymmetric_profile",
    "bracket_exceptional_point",
    "find_exceptional_point",
    "relative_gap",
    "JordanChain",
    "ep_perturbation",
    "jordan_chain",
    "ShiftRow",
    "ShiftSweep",
    "shift_sweep",
]
