"""Defect parameters and forward models mapping them to resonances."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..bie import DiscretizationConfig
from ..capacitance import CapacitanceMatrix, MaterialWeights, capacitance_matrix, perturbed_capacitance_direct, weight_matrix
from ..errors import InvalidDefectError, SceneError
from ..geometry import ResonatorScene, validate_scene
from ..scattering import BlockSingleLayer, capacitance_expansion
from ..spectral import match_to_reference, principal_sqrt

logger = logging.getLogger(__name__)

# Reference eigenvalues closer than this (relative) are matched as one set
CLUSTER_TOLERANCE = 1e-4


@dataclass(frozen=True)
class MeasuredSpectrum:
    """Resonances ω₁…ω_N, in the reference ordering of the scene."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DefectParams:
    """Defect center and radius."""

    center: Tuple[float, float, float]
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in self.center)
        if len(center) == 2:
            center = center + (0.0,)
        if len(center) != 3:
            raise InvalidDefectError(f"Defect center needs 2 or 3 coordinates, got {len(center)}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class ParameterSpace:
    """
    Free coordinates of the defect.

    With ``plane=True`` the vector is (x, y) for the center (x, y, 0) with y ≥ 0; otherwise
    (x, y, z). ``free_radius`` appends the radius as a last coordinate.
    """

    radius: float
    plane: bool = True
    free_radius: bool = False

    @property
    def dimension(self) -> int:
        return (2 if self.plane else 3) + (1 if self.free_radius else 0)

    def to_params(self, vector: Sequence[float]) -> DefectParams:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.dimension,):
            raise InvalidDefectError(f"Expected {self.dimension} coordinates, got {vector.shape}")
        spatial = 2 if self.plane else 3
        radius = float(vector[-1]) if self.free_radius else self.radius
        return DefectParams(tuple(vector[:spatial]), radius)

    def to_vector(self, params: DefectParams) -> np.ndarray:
        spatial = params.center[:2] if self.plane else params.center
        values = list(spatial) + ([params.radius] if self.free_radius else [])
        return np.array(values, dtype=float)


def cluster_groups(values: np.ndarray, tolerance: float = CLUSTER_TOLERANCE) -> List[Tuple[int, ...]]:
    """Groups of indices whose values lie within ``tolerance`` (relative) of each other."""
    scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    groups: List[List[int]] = []
    for index, value in enumerate(values):
        for group in groups:
            if any(abs(value - values[k]) <= tolerance * scale for k in group):
                group.append(index)
                break
        else:
            groups.append([index])
    return [tuple(g) for g in groups if len(g) > 1]


class ForwardModel(ABC):
    """Abstract map from defect parameters to the N resonator resonances."""

    @property
    @abstractmethod
    def resonator_count(self) -> int:
        """Number N of predicted resonances."""
        pass

    @abstractmethod
    def resonances(self, params: DefectParams) -> np.ndarray:
        """
        Predict the resonances for a defect with ``params``.

        Args:
            params: Defect center and radius

        Returns:
            Length-N complex array in the model's reference ordering

        Raises:
            InvalidDefectError: If the defect cannot be placed at ``params``
        """
        pass

    @abstractmethod
    def get_model_name(self) -> str:
        """Return the model name for logging."""
        pass

    @property
    def clusters(self) -> List[Tuple[int, ...]]:
        """Index groups whose branches are matched as a set (exceptional-point pairs)."""
        return []

    def spectrum(self, params: DefectParams) -> MeasuredSpectrum:
        return MeasuredSpectrum(self.resonances(params))


class CapacitanceForwardModel(ForwardModel):
    """
    Resonances from the perturbed capacitance of ``scene`` with the defect at ``params``.

    By default the N×N resonator block of C̃ is weighted with the resonator weights; with
    ``full_system=True`` the (N+1)-body problem diag(w̃)·C̃ is solved and its N branches
    nearest the unperturbed spectrum are kept.
    """

    def __init__(
        self,
        scene: ResonatorScene,
        config: Optional[DiscretizationConfig] = None,
        full_system: bool = False,
    ):
        if not scene.has_defect:
            raise SceneError("Forward model needs a scene with a defect template (material)")
        self.scene = scene
        self.config = config
        self.full_system = full_system

        self.unperturbed = capacitance_matrix(scene.without_defect(), config)
        self.resonator_weights = weight_matrix(scene.without_defect())
        matrix = self.resonator_weights.values[:, None] * self.unperturbed.entries
        eigenvalues = np.linalg.eigvals(matrix)
        self.reference_eigenvalues = eigenvalues[np.lexsort((eigenvalues.imag, eigenvalues.real))]
        self._clusters = cluster_groups(self.reference_eigenvalues)
        if self._clusters:
            logger.info(f"{self.get_model_name()}: branch clusters {self._clusters}")

    @property
    def resonator_count(self) -> int:
        return self.scene.size

    @property
    def clusters(self) -> List[Tuple[int, ...]]:
        return self._clusters

    @property
    def reference_resonances(self) -> np.ndarray:
        return principal_sqrt(self.reference_eigenvalues)

    def get_model_name(self) -> str:
        return "capacitance-full" if self.full_system else "capacitance"

    def place(self, params: DefectParams) -> ResonatorScene:
        """Scene with the defect at ``params``; rejects invalid placements."""
        if not np.isfinite(params.radius) or params.radius <= 0:
            raise InvalidDefectError(f"Defect radius must be > 0, got {params.radius}")
        if not np.all(np.isfinite(params.center)):
            raise InvalidDefectError(f"Defect center is not finite: {params.center}")
        scene = self.scene.with_defect(params.center, params.radius)
        violations = validate_scene(scene)
        if violations:
            raise InvalidDefectError("; ".join(v.message for v in violations))
        return scene

    def perturbed_capacitance(self, scene: ResonatorScene) -> CapacitanceMatrix:
        return perturbed_capacitance_direct(scene, self.config)

    def resonances(self, params: DefectParams) -> np.ndarray:
        scene = self.place(params)
        capacitance = self.perturbed_capacitance(scene)
        if self.full_system:
            weights: MaterialWeights = weight_matrix(scene)
            matrix = weights.values[:, None] * capacitance.entries
        else:
            matrix = self.resonator_weights.values[:, None] * capacitance.resonator_block()
        eigenvalues = match_to_reference(np.linalg.eigvals(matrix), self.reference_eigenvalues)
        return principal_sqrt(eigenvalues)


class ExpansionForwardModel(CapacitanceForwardModel):
    """Capacitance forward model with C̃ from the multiple-scattering expansion of order ``n_max``."""

    def __init__(
        self,
        scene: ResonatorScene,
        config: Optional[DiscretizationConfig] = None,
        n_max: int = 1,
        full_system: bool = False,
    ):
        super().__init__(scene, config, full_system)
        self.n_max = n_max

    def get_model_name(self) -> str:
        return f"expansion-{self.n_max}"

    def perturbed_capacitance(self, scene: ResonatorScene) -> CapacitanceMatrix:
        blocks = BlockSingleLayer.from_scene(scene, self.config)
        return capacitance_expansion(blocks, self.n_max).capacitance()


def forward_resonances(
    params: DefectParams,
    scene: ResonatorScene,
    config: Optional[DiscretizationConfig] = None,
) -> MeasuredSpectrum:
    """Resonances of ``scene`` with its defect moved to ``params``."""
    return CapacitanceForwardModel(scene, config).spectrum(params)
