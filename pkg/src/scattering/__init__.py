"""Multiple-scattering expansion of the resonator-plus-defect single layer."""

from .blocks import BlockSingleLayer, ReflectionOperators, reflections, require_convergent, spectral_radius
from .expansion import (
    CorrectionMatrix,
    ExpansionResult,
    TruncationReport,
    capacitance_expansion,
    first_order_correction,
    neumann_partial_sum,
    truncation_report,
    zeroth_order_coupling,
)

__all__ = [
    "BlockSingleLayer",
    "ReflectionOperators",
    "reflections",
    "require_convergent",
    "spectral_radius",
    "CorrectionMatrix",
    "ExpansionResult",
    "TruncationReport",
    "capacitance_expansion",
    "first_order_correction",
    "neumann_partial_sum",
    "truncation_report",
    "zeroth_order_coupling",
]
