"""Boundary-integral core: harmonic bases and the Galerkin single layer."""

from .harmonics import harmonic_count, harmonic_degrees, harmonic_index, real_harmonics, sphere_quadrature
from .single_layer import (
    BlockPartition,
    DensityVector,
    DiscretizationConfig,
    GalerkinOperator,
    SingleLayerAssembler,
    assemble_single_layer,
    block_partition,
    boundary_integral,
    get_assembler,
    indicator_matrix,
    indicator_rhs,
    solve_density,
)

__all__ = [
    "harmonic_count",
    "harmonic_degrees",
    "harmonic_index",
    "real_harmonics",
    "sphere_quadrature",
    "BlockPartition",
    "DensityVector",
    "DiscretizationConfig",
    "GalerkinOperator",
    "SingleLayerAssembler",
    "assemble_single_layer",
    "block_partition",
    "boundary_integral",
    "get_assembler",
    "indicator_matrix",
    "indicator_rhs",
    "solve_density",
]
