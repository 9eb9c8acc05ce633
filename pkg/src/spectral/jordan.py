"""Jordan chains at defective eigenvalues and the exceptional-point root expansion."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..capacitance import MaterialWeights
from ..config import Config
from ..errors import ChainNormalizationError, NotDefectiveError
from .eigen import CorrectionLike, MatrixLike, PerturbationResult, as_matrix, effective_perturbation, principal_sqrt

logger = logging.getLogger(__name__)

NORMALIZATION_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class JordanChain:
    """
    Right chain X = [x₁…x_r] and left chain Y = [y_r…y₁] at λ, with Y*X = I.

    (𝒞 - λI)x₁ = 0 and (𝒞 - λI)x_{j+1} = x_j; the left chain satisfies the same relations
    for 𝒞ᴴ. ``Y[:, -1]`` is the left eigenvector y₁.
    """

    eigenvalue: complex
    order: int
    X: np.ndarray
    Y: np.ndarray
    tolerance: float

    @property
    def resonance(self) -> complex:
        return complex(principal_sqrt(self.eigenvalue))

    @property
    def right_eigenvector(self) -> np.ndarray:
        return self.X[:, 0]

    @property
    def left_eigenvector(self) -> np.ndarray:
        return self.Y[:, -1]

    def chain_residual(self, matrix: MatrixLike) -> float:
        """Largest ‖(𝒞 - λI)x_{j+1} - x_j‖ over the right chain, x₀ = 0."""
        shifted = as_matrix(matrix) - self.eigenvalue * np.eye(self.X.shape[0])
        previous = np.zeros(self.X.shape[0], dtype=complex)
        worst = 0.0
        for j in range(self.order):
            worst = max(worst, float(np.linalg.norm(shifted @ self.X[:, j] - previous)))
            previous = self.X[:, j]
        return worst

    def normalization_error(self) -> float:
        return float(np.max(np.abs(self.Y.conj().T @ self.X - np.eye(self.order))))


def _unit_pivot(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def jordan_chain(
    matrix: MatrixLike,
    eigenvalue: complex,
    order: int = 2,
    tolerance: Optional[float] = None,
) -> JordanChain:
    """
    Build normalized right and left Jordan chains of length ``order`` at ``eigenvalue``.

    Defectiveness is read off singular values: σ_min(𝒞 - λI) is negligible, the next one is
    not (geometric multiplicity one), and (𝒞 - λI)^r has ``order`` negligible singular values.

    Raises:
        NotDefectiveError: If the eigenvalue is not defective of the requested order
        ChainNormalizationError: If Y*X cannot be brought to the identity
    """
    if tolerance is None:
        tolerance = Config.DEFECTIVE_TOLERANCE
    if order < 2:
        raise ValueError(f"Jordan chain order must be >= 2, got {order}")

    entries = as_matrix(matrix).astype(complex)
    n = entries.shape[0]
    if order > n:
        raise NotDefectiveError(f"Order {order} exceeds matrix dimension {n}")

    scale = float(np.linalg.norm(entries, 2)) or 1.0
    shifted = entries - eigenvalue * np.eye(n)

    U, sigma, Vh = np.linalg.svd(shifted)
    if sigma[-1] > tolerance * scale:
        raise NotDefectiveError(
            f"{eigenvalue:.6g} is not an eigenvalue (σ_min {sigma[-1]:.3e})"
        )
    if n > 1 and sigma[-2] <= tolerance * scale:
        raise NotDefectiveError(
            f"Geometric multiplicity of {eigenvalue:.6g} exceeds one"
        )
    power_sigma = np.linalg.svd(np.linalg.matrix_power(shifted, order), compute_uv=False)
    if np.any(power_sigma[-order:] > tolerance * scale**order):
        raise NotDefectiveError(
            f"{eigenvalue:.6g} is not defective of order {order} "
            f"(σ of power: {power_sigma[-order:]})"
        )

    x = _unit_pivot(Vh[-1].conj())
    y = U[:, -1]

    pseudo = np.linalg.pinv(shifted, rcond=tolerance)
    pseudo_adjoint = pseudo.conj().T
    right = [x]
    left = [y]
    for _ in range(order - 1):
        right.append(pseudo @ right[-1])
        left.append(pseudo_adjoint @ left[-1])

    X = np.column_stack(right)
    Y = np.column_stack(left[::-1])

    overlap = Y.conj().T @ X
    if np.linalg.cond(overlap) > NORMALIZATION_CONDITION_LIMIT:
        raise ChainNormalizationError(
            f"Chain overlap Y*X is singular (condition {np.linalg.cond(overlap):.3e})"
        )
    # Y* <- M⁻¹Y* leaves X untouched
    Y = np.linalg.solve(overlap, Y.conj().T).conj().T

    chain = JordanChain(eigenvalue=complex(eigenvalue), order=order, X=X, Y=Y, tolerance=tolerance)
    logger.debug(
        f"Jordan chain at {eigenvalue:.6g}: residual {chain.chain_residual(entries):.3e}, "
        f"normalization {chain.normalization_error():.3e}"
    )
    return chain


def ep_perturbation(
    chain: JordanChain,
    weights: Union[MaterialWeights, Sequence[complex]],
    correction: CorrectionLike,
    regime: Optional[float] = None,
) -> PerturbationResult:
    """
    Branches ω̃_m = √(λ + ξ^{1/r} e^{2πim/r}), m = 0..r-1, with ξ = y₁*(D_δE)x₁.

    Args:
        chain: Normalized Jordan chain of the unperturbed 𝒞
        weights: D_δ of the perturbed system (resonators first)
        correction: E, or D_δE-compatible matrix of size N or N+1
        regime: Optional ratio |∂Ω|^{1/2}/d; the remainder estimate is regime^{2/r}
    """
    operator = effective_perturbation(weights, correction, chain.X.shape[0])
    xi = complex(np.vdot(chain.left_eigenvector, operator @ chain.right_eigenvector))

    r = chain.order
    root = xi ** (1.0 / r) if xi != 0 else 0j
    branches = chain.eigenvalue + root * np.exp(2j * np.pi * np.arange(r) / r)

    return PerturbationResult(
        eigenvalues=branches,
        resonances=principal_sqrt(branches),
        xi=xi,
        order=r,
        remainder_estimate=None if regime is None else regime ** (2.0 / r),
    )
