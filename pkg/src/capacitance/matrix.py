"""Capacitance matrices, material weights and the weighted capacitance."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..bie import (
    DiscretizationConfig,
    GalerkinOperator,
    boundary_integral,
    get_assembler,
    indicator_rhs,
    solve_density,
)
from ..config import Config
from ..errors import DefectTooSmallError, MissingDefectError, SceneError
from ..geometry import ResonatorScene, regime_ratio, require_valid

logger = logging.getLogger(__name__)

DEFECT_LABEL = "Omega"


def body_labels(count: int, with_defect: bool = False) -> Tuple[str, ...]:
    labels = tuple(f"D{i + 1}" for i in range(count))
    return labels + (DEFECT_LABEL,) if with_defect else labels


@dataclass(frozen=True)
class CapacitanceMatrix:
    """C (N×N) or C̃ ((N+1)×(N+1)) with row/column labels."""

    entries: np.ndarray
    labels: Tuple[str, ...]

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def has_defect(self) -> bool:
        return bool(self.labels) and self.labels[-1] == DEFECT_LABEL

    def resonator_block(self) -> np.ndarray:
        """Leading block over the resonators (the whole matrix without a defect)."""
        n = self.size - 1 if self.has_defect else self.size
        return self.entries[:n, :n]

    def symmetry_error(self) -> float:
        """max |C - Cᵀ| relative to max |C|."""
        scale = np.max(np.abs(self.entries))
        return float(np.max(np.abs(self.entries - self.entries.T)) / scale) if scale else 0.0


@dataclass(frozen=True)
class MaterialWeights:
    """Per-body weights w_i = δ_i v_i² / |D_i|; ``matrix`` is D_δ = diag(w)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(values)) or np.any(values == 0):
            raise SceneError(f"Material weights must be finite and nonzero, got {values}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.values)

    def leading(self, count: int) -> "MaterialWeights":
        """Weights of the first ``count`` bodies."""
        return MaterialWeights(self.values[:count])

    def scaled(self, factor: complex) -> "MaterialWeights":
        return MaterialWeights(self.values * factor)


@dataclass(frozen=True)
class WeightedCapacitance:
    """𝒞 = diag(w)·C."""

    entries: np.ndarray
    weights: MaterialWeights
    labels: Tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))


def _capacitance_from_operator(op: GalerkinOperator, count: int) -> np.ndarray:
    """C_ij = ∫_{∂B_i} S⁻¹[χ_{∂B_j}] for the first ``count`` bodies of ``op``."""
    entries = np.empty((count, count))
    for j in range(count):
        density = solve_density(op, indicator_rhs(op, j))
        for i in range(count):
            entries[i, j] = boundary_integral(density, i)
    return entries


def capacitance_matrix(
    scene: ResonatorScene,
    config: Optional[DiscretizationConfig] = None,
) -> CapacitanceMatrix:
    """
    Capacitance matrix of the resonators of ``scene`` (any defect is ignored).

    Args:
        scene: Resonator scene with N >= 1
        config: Discretization settings (defaults from Config)

    Returns:
        N×N CapacitanceMatrix labelled D1..DN
    """
    if scene.size == 0:
        raise SceneError("Capacitance requires at least one resonator")
    if scene.has_defect:
        logger.debug("capacitance_matrix ignores the defect; use perturbed_capacitance_direct")
        scene = scene.without_defect()
    require_valid(scene)

    op = get_assembler(config).assemble(scene.spheres)
    entries = _capacitance_from_operator(op, scene.size)
    return CapacitanceMatrix(entries, body_labels(scene.size))


def perturbed_capacitance_direct(
    scene: ResonatorScene,
    config: Optional[DiscretizationConfig] = None,
) -> CapacitanceMatrix:
    """
    Capacitance C̃ of resonators plus defect from a direct solve on the full union.

    Raises:
        MissingDefectError: If the scene has no defect
        DefectTooSmallError: If the defect radius is below ``Config.MIN_DEFECT_RADIUS``
    """
    if not scene.has_defect:
        raise MissingDefectError("Perturbed capacitance requires a defect")
    radius = scene.defect.sphere.radius
    if radius < Config.MIN_DEFECT_RADIUS:
        raise DefectTooSmallError(
            f"Defect radius {radius:.3e} below {Config.MIN_DEFECT_RADIUS:.1e}"
        )
    require_valid(scene)

    report = regime_ratio(scene)
    if not report.in_regime:
        logger.warning(
            f"Defect outside the small regime: ratio {report.ratio:.3e} >= {report.threshold}"
        )

    op = get_assembler(config).assemble(scene.spheres)
    entries = _capacitance_from_operator(op, scene.size + 1)
    return CapacitanceMatrix(entries, body_labels(scene.size, with_defect=True))


def weight_matrix(scene: ResonatorScene) -> MaterialWeights:
    """Weights δ_i v_i² / ((4/3)π R_i³) of every body, the defect last."""
    return MaterialWeights(
        np.array([body.material.weight(body.sphere) for body in scene.bodies], dtype=complex)
    )


def weighted_capacitance(
    capacitance: Union[CapacitanceMatrix, np.ndarray],
    weights: Union[MaterialWeights, Sequence[complex]],
) -> WeightedCapacitance:
    """
    Form 𝒞 = diag(w)·C.

    Raises:
        ValueError: If the weight count differs from the matrix dimension
    """
    labels: Tuple[str, ...] = ()
    if isinstance(capacitance, CapacitanceMatrix):
        labels = capacitance.labels
        entries = capacitance.entries
    else:
        entries = np.asarray(capacitance)
    if not isinstance(weights, MaterialWeights):
        weights = MaterialWeights(np.asarray(weights))

    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"Capacitance must be square, got shape {entries.shape}")
    if len(weights) != entries.shape[0]:
        raise ValueError(
            f"Dimension mismatch: {len(weights)} weights for a {entries.shape[0]}x"
            f"{entries.shape[1]} capacitance"
        )
    return WeightedCapacitance(weights.values[:, None] * entries, weights, labels)
