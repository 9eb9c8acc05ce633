"""Resonances, left/right eigenpairs and the simple-eigenvalue perturbation formula."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..capacitance import MaterialWeights, WeightedCapacitance
from ..config import Config
from ..errors import EigensolverError, IllConditionedEigenvalueError
from ..scattering import CorrectionMatrix

logger = logging.getLogger(__name__)

MatrixLike = Union[WeightedCapacitance, np.ndarray]
CorrectionLike = Union[CorrectionMatrix, np.ndarray]

# Eigenvalues closer than this (relative to ‖𝒞‖) count as clustered
CLUSTER_TOLERANCE = 1e-6


def as_matrix(matrix: MatrixLike) -> np.ndarray:
    if isinstance(matrix, WeightedCapacitance):
        return matrix.entries
    return np.asarray(matrix)


def principal_sqrt(values) -> np.ndarray:
    """Principal square root; results have nonnegative real part."""
    return np.sqrt(np.asarray(values, dtype=complex))


def _order(eigenvalues: np.ndarray) -> np.ndarray:
    return np.lexsort((eigenvalues.imag, eigenvalues.real))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues λ_n of 𝒞, resonances ω_n = √λ_n and eigenvector matrices."""

    eigenvalues: np.ndarray
    resonances: np.ndarray
    right: np.ndarray
    left: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)


def resonances(matrix: MatrixLike) -> Spectrum:
    """
    Full eigendecomposition of 𝒞, ordered by real then imaginary part.

    Raises:
        EigensolverError: If the eigensolver fails
    """
    entries = as_matrix(matrix)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {entries.shape}")
    try:
        eigenvalues, left, right = scipy.linalg.eig(entries, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverError(f"Eigensolver failed: {e}") from e

    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    order = _order(eigenvalues)
    eigenvalues = eigenvalues[order]
    return Spectrum(
        eigenvalues=eigenvalues,
        resonances=principal_sqrt(eigenvalues),
        right=right[:, order],
        left=left[:, order],
    )


@dataclass(frozen=True)
class EigenPair:
    """λ with unit right vector x and left vector y normalized so that y*x ≥ 0."""

    eigenvalue: complex
    right: np.ndarray
    left: np.ndarray
    condition: float
    clustered: bool = False

    @property
    def resonance(self) -> complex:
        return complex(principal_sqrt(self.eigenvalue))


def _normalize_right(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def _normalize_left(vector: np.ndarray, right: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    overlap = np.vdot(vector, right)
    if abs(overlap) > 0:
        # y -> y·e^{iθ} changes y*x by e^{-iθ}
        vector = vector * (overlap / abs(overlap))
    return vector


def eigenpairs(matrix: MatrixLike) -> List[EigenPair]:
    """
    Matched right and left eigenvectors of 𝒞 with their conditions |y*x|.

    Left vectors come from a separate eigensolve of 𝒞ᴴ; pairs are matched by eigenvalue
    proximity. Eigenvalues within a relative 1e-6 of another are flagged as clustered
    rather than disambiguated.
    """
    entries = as_matrix(matrix).astype(complex)
    try:
        eigenvalues, right = np.linalg.eig(entries)
        adjoint_values, left = np.linalg.eig(entries.conj().T)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"Eigensolver failed: {e}") from e

    distance = np.abs(eigenvalues[:, None] - adjoint_values.conj()[None, :])
    rows, cols = linear_sum_assignment(distance)

    scale = max(np.linalg.norm(entries, 2), np.finfo(float).tiny)
    gaps = np.abs(eigenvalues[:, None] - eigenvalues[None, :]) + np.diag(
        np.full(len(eigenvalues), np.inf)
    )
    clustered = gaps.min(axis=1) <= CLUSTER_TOLERANCE * scale if len(eigenvalues) > 1 else [False]

    pairs = []
    for i, j in zip(rows, cols):
        x = _normalize_right(right[:, i])
        y = _normalize_left(left[:, j], x)
        pairs.append(
            EigenPair(
                eigenvalue=complex(eigenvalues[i]),
                right=x,
                left=y,
                condition=float(abs(np.vdot(y, x))),
                clustered=bool(clustered[i]),
            )
        )
        if clustered[i]:
            logger.warning(
                f"Clustered eigenvalue {eigenvalues[i]:.6g}: left/right matching is ambiguous"
            )

    pairs.sort(key=lambda p: (p.eigenvalue.real, p.eigenvalue.imag))
    return pairs


@dataclass(frozen=True)
class PerturbationResult:
    """Predicted perturbed eigenvalues and resonances (one per branch)."""

    eigenvalues: np.ndarray
    resonances: np.ndarray
    xi: complex
    order: int = 1
    remainder_estimate: Optional[float] = None


def effective_perturbation(
    weights: Union[MaterialWeights, Sequence[complex]],
    correction: CorrectionLike,
    dimension: int,
) -> np.ndarray:
    """
    D_δE restricted to the first ``dimension`` coordinates.

    Zero-padding N-vectors to N+1 entries makes y*(D_δE)x depend only on this block.
    """
    values = weights.values if isinstance(weights, MaterialWeights) else np.asarray(weights)
    E = correction.E if isinstance(correction, CorrectionMatrix) else np.asarray(correction)
    if len(values) < dimension or E.shape[0] < dimension:
        raise ValueError(
            f"Perturbation of size {E.shape[0]} with {len(values)} weights cannot act on "
            f"dimension {dimension}"
        )
    return values[:dimension, None] * E[:dimension, :dimension]


def simple_perturbation(
    pair: EigenPair,
    weights: Union[MaterialWeights, Sequence[complex]],
    correction: CorrectionLike,
    condition_floor: Optional[float] = None,
    regime: Optional[float] = None,
) -> PerturbationResult:
    """
    λ̃ = λ + y*(D_δE)x / (y*x) and ω̃ = √λ̃ for a simple eigenvalue.

    Args:
        pair: Eigenpair of the unperturbed 𝒞
        weights: D_δ of the perturbed system (resonators first)
        correction: E from the multiple-scattering expansion
        condition_floor: Minimum |y*x| (default ``Config.EIGEN_CONDITION_FLOOR``)
        regime: Optional smallness ratio |∂Ω|^{1/2}/d, squared into the remainder estimate

    Raises:
        IllConditionedEigenvalueError: If |y*x| is below the floor; use the
            exceptional-point expansion instead
    """
    if condition_floor is None:
        condition_floor = Config.EIGEN_CONDITION_FLOOR
    if pair.condition < condition_floor:
        raise IllConditionedEigenvalueError(
            f"Eigenvalue {pair.eigenvalue:.6g} has condition {pair.condition:.3e} below "
            f"{condition_floor:.1e}; use ep_perturbation"
        )

    n = len(pair.right)
    operator = effective_perturbation(weights, correction, n)
    shift = np.vdot(pair.left, operator @ pair.right) / np.vdot(pair.left, pair.right)
    eigenvalue = pair.eigenvalue + shift

    return PerturbationResult(
        eigenvalues=np.array([eigenvalue]),
        resonances=principal_sqrt([eigenvalue]),
        xi=complex(shift),
        order=1,
        remainder_estimate=None if regime is None else regime**2,
    )


def match_to_reference(values: Sequence[complex], reference: Sequence[complex]) -> np.ndarray:
    """
    Pick and order ``values`` so that entry j is the one assigned to ``reference[j]``.

    Minimum-total-distance assignment; ``values`` may be longer than ``reference``, in which
    case unmatched entries are dropped.
    """
    values = np.asarray(values, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    distance = np.abs(reference[:, None] - values[None, :])
    rows, cols = linear_sum_assignment(distance)
    matched = np.empty(len(reference), dtype=complex)
    matched[rows] = values[cols]
    return matched
