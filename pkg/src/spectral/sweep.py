"""Resonance shifts under a shrinking defect, direct and predicted by the expansions."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..bie import DiscretizationConfig
from ..capacitance import capacitance_matrix, perturbed_capacitance_direct, weight_matrix, weighted_capacitance
from ..config import Config
from ..errors import MissingDefectError
from ..geometry import ResonatorScene, regime_ratio
from ..scattering import BlockSingleLayer, first_order_correction
from ..utils import loglog_slope
from .eigen import eigenpairs, match_to_reference, principal_sqrt, simple_perturbation
from .jordan import ep_perturbation, jordan_chain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShiftRow:
    """|ω̃_j - ω_j| per resonance at one defect radius."""

    radius: float
    direct: Tuple[float, ...]
    predicted: Tuple[float, ...]


@dataclass
class ShiftSweep:
    """Shift rows over a radius grid, with the index groups of each expansion kind."""

    reference: np.ndarray
    kinds: Tuple[str, ...]
    rows: List[ShiftRow] = field(default_factory=list)

    @property
    def radii(self) -> np.ndarray:
        return np.array([row.radius for row in self.rows])

    def direct_shifts(self, index: int) -> np.ndarray:
        return np.array([row.direct[index] for row in self.rows])

    def predicted_shifts(self, index: int) -> np.ndarray:
        return np.array([row.predicted[index] for row in self.rows])

    def slopes(self) -> Dict[str, List[Optional[float]]]:
        """Log-log slopes of the direct and predicted shifts against the radius."""

        def fit(values: np.ndarray) -> Optional[float]:
            if len(values) < 2 or np.any(values <= 0):
                return None
            return loglog_slope(self.radii, values)

        count = len(self.kinds)
        return {
            "direct": [fit(self.direct_shifts(j)) for j in range(count)],
            "predicted": [fit(self.predicted_shifts(j)) for j in range(count)],
        }


def shift_sweep(
    scene: ResonatorScene,
    radii: Sequence[float],
    config: Optional[DiscretizationConfig] = None,
    condition_floor: Optional[float] = None,
) -> ShiftSweep:
    """
    Shift of every resonator resonance as the defect radius runs over ``radii``.

    The defect keeps the center and material of the scene's defect. Clustered eigenvalues
    and those with condition below ``condition_floor`` are treated as one exceptional-point
    pair and predicted with the root expansion; all others with the simple formula.

    Raises:
        MissingDefectError: If the scene has no defect template
        ValueError: If ``radii`` is empty
    """
    if not scene.has_defect:
        raise MissingDefectError("Radius sweep needs a defect template")
    if len(radii) == 0:
        raise ValueError("Radius grid is empty")
    if condition_floor is None:
        condition_floor = Config.EIGEN_CONDITION_FLOOR

    resonators = scene.without_defect()
    weights = weight_matrix(resonators)
    unperturbed = weighted_capacitance(capacitance_matrix(resonators, config), weights)
    pairs = eigenpairs(unperturbed)
    reference = np.array([p.eigenvalue for p in pairs])
    omega = principal_sqrt(reference)

    ep_indices = [
        j for j, p in enumerate(pairs) if p.clustered or p.condition < condition_floor
    ]
    chain = None
    if len(ep_indices) == 2:
        midpoint = reference[ep_indices].mean()
        chain = jordan_chain(unperturbed, midpoint, 2)
    elif ep_indices:
        logger.warning(f"Unsupported ill-conditioned eigenvalue group {ep_indices}; using simple formula")
        ep_indices = []
    kinds = tuple("ep" if j in ep_indices else "simple" for j in range(len(pairs)))

    sweep = ShiftSweep(reference=reference, kinds=kinds)
    center = scene.defect.sphere.center
    for radius in radii:
        perturbed = scene.with_defect(center, radius)
        capacitance = perturbed_capacitance_direct(perturbed, config)
        direct = match_to_reference(
            np.linalg.eigvals(weights.values[:, None] * capacitance.resonator_block()), reference
        )

        correction = first_order_correction(BlockSingleLayer.from_scene(perturbed, config))
        ratio = regime_ratio(perturbed).ratio
        predicted = np.empty(len(pairs), dtype=complex)
        for j, pair in enumerate(pairs):
            if kinds[j] == "simple":
                predicted[j] = simple_perturbation(
                    pair, weights, correction, condition_floor=0.0, regime=ratio
                ).eigenvalues[0]
        if chain is not None:
            branches = ep_perturbation(chain, weights, correction, regime=ratio).eigenvalues
            predicted[ep_indices] = match_to_reference(branches, direct[ep_indices])

        row = ShiftRow(
            radius=float(radius),
            direct=tuple(np.abs(principal_sqrt(direct) - omega)),
            predicted=tuple(np.abs(principal_sqrt(predicted) - omega)),
        )
        sweep.rows.append(row)
        logger.debug(f"Sweep radius {radius:.3e}: direct {row.direct}")
    return sweep
