"""Gain/loss tuning of material weights towards an exceptional point."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..capacitance import CapacitanceMatrix, MaterialWeights, weighted_capacitance
from ..config import Config
from ..errors import EigensolverError, ExceptionalPointNotFoundError, SceneError
from ..geometry import Material, ResonatorScene
from .eigen import eigenpairs

logger = logging.getLogger(__name__)


def antisymmetric_profile(count: int) -> np.ndarray:
    """Gain profile (1, …, 0, …, -1): gain on the first body, loss on the last."""
    if count == 1:
        return np.zeros(1)
    return np.linspace(1.0, -1.0, count)


@dataclass(frozen=True)
class GainLossParameterization:
    """
    w_j(τ, μ) = w0_j · (1 + iτ·a_j) · (1 + μ·b_j).

    ``a`` is the gain/loss profile and ``b`` the magnitude profile; by default a is
    antisymmetric and b = 1 - |a|, which for three bodies scales the middle one.
    """

    base_weights: np.ndarray
    gain_profile: Optional[np.ndarray] = None
    magnitude_profile: Optional[np.ndarray] = None

    def __post_init__(self):
        base = np.asarray(self.base_weights, dtype=complex)
        object.__setattr__(self, "base_weights", base)
        gain = (
            antisymmetric_profile(len(base))
            if self.gain_profile is None
            else np.asarray(self.gain_profile, dtype=float)
        )
        magnitude = (
            1.0 - np.abs(gain) if self.magnitude_profile is None
            else np.asarray(self.magnitude_profile, dtype=float)
        )
        if gain.shape != base.shape or magnitude.shape != base.shape:
            raise ValueError(
                f"Profiles must have {len(base)} entries, got {gain.shape} and {magnitude.shape}"
            )
        object.__setattr__(self, "gain_profile", gain)
        object.__setattr__(self, "magnitude_profile", magnitude)

    @classmethod
    def for_scene(cls, scene: ResonatorScene, **profiles) -> "GainLossParameterization":
        """Parameterization around the resonator materials of ``scene``."""
        base = [body.material.weight(body.sphere) for body in scene.resonators]
        return cls(np.array(base, dtype=complex), **profiles)

    def factors(self, parameters: Sequence[float]) -> np.ndarray:
        tau, mu = parameters
        return (1.0 + 1j * tau * self.gain_profile) * (1.0 + mu * self.magnitude_profile)

    def weights(self, parameters: Sequence[float]) -> MaterialWeights:
        return MaterialWeights(self.base_weights * self.factors(parameters))

    def apply_to_scene(self, scene: ResonatorScene, parameters: Sequence[float]) -> ResonatorScene:
        """Scale every resonator contrast δ_j by its factor (weights are linear in δ)."""
        factors = self.factors(parameters)
        materials = [
            Material(body.material.delta * factor, body.material.wave_speed)
            for body, factor in zip(scene.resonators, factors)
        ]
        return scene.with_materials(materials)


@dataclass(frozen=True)
class ExceptionalPointResult:
    """Tuned parameters (τ, μ), weights and diagnostics of the coalesced pair."""

    parameters: Tuple[float, float]
    weights: MaterialWeights
    gap: float
    condition: float
    eigenvalue: complex
    pair: Tuple[int, int]
    iterations: int = 0
    history: Tuple[float, ...] = field(default=(), repr=False)


def _entries(capacitance: Union[CapacitanceMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(capacitance, CapacitanceMatrix):
        return capacitance.resonator_block()
    return np.asarray(capacitance)


def _closest_pair(eigenvalues: np.ndarray) -> Tuple[float, Tuple[int, int]]:
    best = (np.inf, (0, 1))
    for i in range(len(eigenvalues)):
        for j in range(i + 1, len(eigenvalues)):
            gap = abs(eigenvalues[i] - eigenvalues[j])
            if gap < best[0]:
                best = (gap, (i, j))
    return best


def relative_gap(
    capacitance: Union[CapacitanceMatrix, np.ndarray],
    weights: MaterialWeights,
) -> Tuple[float, Tuple[int, int], np.ndarray]:
    """Smallest pairwise eigenvalue gap of diag(w)·C relative to ‖diag(w)·C‖₂."""
    matrix = weighted_capacitance(_entries(capacitance), weights).entries
    eigenvalues = np.sort_complex(np.linalg.eigvals(matrix))
    gap, pair = _closest_pair(eigenvalues)
    return gap / np.linalg.norm(matrix, 2), pair, eigenvalues


def _objective(capacitance, parameterization, parameters) -> float:
    try:
        gap, _, _ = relative_gap(capacitance, parameterization.weights(parameters))
    except (SceneError, np.linalg.LinAlgError):
        return np.inf
    return gap if np.isfinite(gap) else np.inf


def bracket_exceptional_point(
    capacitance: Union[CapacitanceMatrix, np.ndarray],
    parameterization: GainLossParameterization,
    taus: Optional[Sequence[float]] = None,
    mu: float = 0.0,
) -> Tuple[float, float]:
    """
    Scan the gain/loss amplitude τ on a grid and return (τ, gap) at the smallest gap.
    """
    if taus is None:
        taus = np.linspace(0.0, 2.0, 201)[1:]
    gaps = [_objective(capacitance, parameterization, (tau, mu)) for tau in taus]
    best = int(np.argmin(gaps))
    logger.debug(f"EP bracket: τ={taus[best]:.4f}, relative gap {gaps[best]:.3e}")
    return float(taus[best]), float(gaps[best])


def find_exceptional_point(
    capacitance: Union[CapacitanceMatrix, np.ndarray],
    parameterization: GainLossParameterization,
    initial_guess: Optional[Sequence[float]] = None,
    max_iterations: int = 2000,
    initial_step: float = 0.05,
    min_step: float = 1e-15,
    gap_tolerance: Optional[float] = None,
    condition_ceiling: Optional[float] = None,
) -> ExceptionalPointResult:
    """
    Tune (τ, μ) until two eigenvalues of diag(w(τ, μ))·C coalesce.

    Coordinate search with shrinking steps on the relative eigenvalue gap. Without an
    initial guess the τ-grid bracket is used as the starting point.

    Raises:
        ExceptionalPointNotFoundError: If the gap stays above ``gap_tolerance`` or the
            coalesced pair is not defective (|y*x| above ``condition_ceiling``)
    """
    if gap_tolerance is None:
        gap_tolerance = Config.EP_GAP_TOLERANCE
    if condition_ceiling is None:
        condition_ceiling = Config.EP_CONDITION_CEILING

    if initial_guess is None:
        tau0, _ = bracket_exceptional_point(capacitance, parameterization)
        initial_guess = (tau0, 0.0)

    parameters = np.asarray(initial_guess, dtype=float)
    best = _objective(capacitance, parameterization, parameters)
    steps = np.full(2, initial_step)
    history = [best]

    iteration = 0
    for iteration in range(1, max_iterations + 1):
        if best <= gap_tolerance or steps.max() < min_step:
            break
        improved = False
        for k in range(2):
            for sign in (1.0, -1.0):
                trial = parameters.copy()
                trial[k] += sign * steps[k]
                value = _objective(capacitance, parameterization, trial)
                if value < best:
                    parameters, best, improved = trial, value, True
                    break
        if not improved:
            steps *= 0.5
        history.append(best)

    logger.info(
        f"EP search: τ={parameters[0]:.10f}, μ={parameters[1]:.3e}, relative gap {best:.3e} "
        f"after {iteration} iterations"
    )
    if not best <= gap_tolerance:
        raise ExceptionalPointNotFoundError(best, parameters)

    weights = parameterization.weights(parameters)
    _, pair, eigenvalues = relative_gap(capacitance, weights)
    eigenvalue = complex(0.5 * (eigenvalues[pair[0]] + eigenvalues[pair[1]]))
    condition = _pair_condition(capacitance, weights, eigenvalue)
    if condition > condition_ceiling:
        logger.warning(f"Coalesced pair is not defective: condition {condition:.3e}")
        raise ExceptionalPointNotFoundError(best, parameters)

    return ExceptionalPointResult(
        parameters=(float(parameters[0]), float(parameters[1])),
        weights=weights,
        gap=float(best),
        condition=condition,
        eigenvalue=eigenvalue,
        pair=pair,
        iterations=iteration,
        history=tuple(history),
    )


def _pair_condition(capacitance, weights: MaterialWeights, eigenvalue: complex) -> float:
    """Largest |y*x| among the eigenpairs nearest the coalesced eigenvalue."""
    matrix = weighted_capacitance(_entries(capacitance), weights).entries
    try:
        pairs = eigenpairs(matrix)
    except EigensolverError:
        return np.inf
    nearest = sorted(pairs, key=lambda p: abs(p.eigenvalue - eigenvalue))[:2]
    return max(p.condition for p in nearest)
