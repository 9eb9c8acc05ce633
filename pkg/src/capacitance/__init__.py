"""Capacitance matrices of resonator scenes."""

from .matrix import (
    DEFECT_LABEL,
    CapacitanceMatrix,
    MaterialWeights,
    WeightedCapacitance,
    body_labels,
    capacitance_matrix,
    perturbed_capacitance_direct,
    weight_matrix,
    weighted_capacitance,
)

__all__ = [
    "DEFECT_LABEL",
    "CapacitanceMatrix",
    "MaterialWeights",
    "WeightedCapacitance",
    "body_labels",
    "capacitance_matrix",
    "perturbed_capacitance_direct",
    "weight_matrix",
    "weighted_capacitance",
]
