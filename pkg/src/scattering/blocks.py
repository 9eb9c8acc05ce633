"""Resonator/defect block single layer and the two reflection operators."""

import logging
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..bie import DiscretizationConfig, GalerkinOperator, block_partition, get_assembler, indicator_matrix
from ..config import Config
from ..errors import DivergenceError, IllConditionedError, MissingDefectError
from ..geometry import ResonatorScene, regime_ratio, require_valid

logger = logging.getLogger(__name__)


class BlockSingleLayer:
    """
    Blocks S_D, S_{D,Ω}, S_{Ω,D}, S_Ω of the single layer on resonators plus defect.

    Also holds the indicator loads F_D (one column per resonator) and f_Ω, so that every
    capacitance entry is a bilinear form in these loads. Factorizations of S_D and S_Ω
    are computed once, under a lock.
    """

    def __init__(self, operator: GalerkinOperator, scene: ResonatorScene):
        partition = block_partition(operator, scene)
        self.operator = operator
        self.scene = scene
        self.S_D = partition.S_D
        self.S_DO = partition.S_DO
        self.S_OD = partition.S_OD
        self.S_O = partition.S_O

        split = self.S_D.shape[0]
        loads = indicator_matrix(operator)
        self.F_D = loads[:split, : scene.size]
        self.f_O = loads[split:, scene.size :]

        self._lock = threading.Lock()
        self._factor_D = None
        self._factor_O = None

    @classmethod
    def from_scene(
        cls,
        scene: ResonatorScene,
        config: Optional[DiscretizationConfig] = None,
    ) -> "BlockSingleLayer":
        """Assemble the full operator of ``scene`` and split it."""
        if not scene.has_defect:
            raise MissingDefectError("Block single layer requires a defect")
        require_valid(scene)
        report = regime_ratio(scene)
        if not report.in_regime:
            logger.warning(
                f"Defect outside the small regime: ratio {report.ratio:.3e} >= {report.threshold}"
            )
        return cls(get_assembler(config).assemble(scene.spheres), scene)

    @property
    def resonator_count(self) -> int:
        return self.scene.size

    @property
    def full_matrix(self) -> np.ndarray:
        return self.operator.matrix

    def _factors(self):
        with self._lock:
            if self._factor_D is None:
                try:
                    self._factor_D = cho_factor(self.S_D)
                    self._factor_O = cho_factor(self.S_O)
                except LinAlgError as e:
                    raise IllConditionedError(f"Singular diagonal block: {e}") from e
            return self._factor_D, self._factor_O

    def solve_D(self, rhs: np.ndarray) -> np.ndarray:
        """S_D⁻¹ rhs."""
        return cho_solve(self._factors()[0], rhs)

    def solve_O(self, rhs: np.ndarray) -> np.ndarray:
        """S_Ω⁻¹ rhs."""
        return cho_solve(self._factors()[1], rhs)

    def apply_T_D(self, block: np.ndarray) -> np.ndarray:
        """T_D applied to columns, without forming T_D."""
        return self.solve_D(self.S_DO @ self.solve_O(self.S_OD @ block))

    def apply_T_O(self, block: np.ndarray) -> np.ndarray:
        return self.solve_O(self.S_OD @ self.solve_D(self.S_DO @ block))


@dataclass(frozen=True)
class ReflectionOperators:
    """T_D = S_D⁻¹S_{D,Ω}S_Ω⁻¹S_{Ω,D} and T_Ω = S_Ω⁻¹S_{Ω,D}S_D⁻¹S_{D,Ω}."""

    T_D: np.ndarray
    T_O: np.ndarray
    spectral_radius: float

    @property
    def norm_D(self) -> float:
        return float(np.linalg.norm(self.T_D, 2))

    @property
    def norm_O(self) -> float:
        return float(np.linalg.norm(self.T_O, 2))

    @property
    def convergent(self) -> bool:
        return self.spectral_radius < 1.0


def spectral_radius(
    matrix: np.ndarray,
    iterations: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> float:
    """
    Power-iteration estimate of the spectral radius.

    Stops once successive estimates agree to ``tolerance`` relative.
    """
    if iterations is None:
        iterations = Config.SPECTRAL_RADIUS_ITERATIONS
    if tolerance is None:
        tolerance = Config.SPECTRAL_RADIUS_TOLERANCE

    vector = np.random.default_rng(0).standard_normal(matrix.shape[0])
    vector /= np.linalg.norm(vector)
    estimate = 0.0
    for step in range(iterations):
        image = matrix @ vector
        norm = np.linalg.norm(image)
        if norm == 0:
            return 0.0
        previous, estimate = estimate, float(norm)
        vector = image / norm
        if step > 0 and abs(estimate - previous) <= tolerance * estimate:
            break
    return estimate


def reflections(blocks: BlockSingleLayer) -> ReflectionOperators:
    """Form both reflection operators and estimate their common spectral radius."""
    T_D = blocks.apply_T_D(np.eye(blocks.S_D.shape[0]))
    T_O = blocks.apply_T_O(np.eye(blocks.S_O.shape[0]))
    # T_D and T_Ω share their nonzero spectrum; T_Ω is the smaller one
    radius = spectral_radius(T_O)
    logger.debug(f"Reflection spectral radius {radius:.3e}")
    return ReflectionOperators(T_D=T_D, T_O=T_O, spectral_radius=radius)


def require_convergent(blocks: BlockSingleLayer) -> ReflectionOperators:
    """Reflections, refusing when the series would diverge."""
    operators = reflections(blocks)
    if not operators.convergent:
        raise DivergenceError(
            f"Spectral radius of T_D is {operators.spectral_radius:.3f} >= 1; "
            f"multiple-scattering series diverges"
        )
    return operators
