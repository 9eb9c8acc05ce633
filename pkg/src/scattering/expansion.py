"""Neumann expansion of the perturbed capacitance in powers of the reflection operators."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..capacitance import CapacitanceMatrix, body_labels
from ..geometry import regime_ratio
from ..utils import geometric_ratio
from .blocks import BlockSingleLayer, require_convergent

logger = logging.getLogger(__name__)

# Errors below this multiple of machine precision times the scale are roundoff
ROUNDOFF_FACTOR = 1e3


@dataclass(frozen=True)
class ExpansionResult:
    """Per-order terms of C̃ and their cumulative sum up to ``order``."""

    order: int
    terms: Tuple[np.ndarray, ...]
    labels: Tuple[str, ...]

    @property
    def partial_sum(self) -> np.ndarray:
        return np.sum(self.terms, axis=0)

    def capacitance(self) -> CapacitanceMatrix:
        return CapacitanceMatrix(self.partial_sum, self.labels)

    def term_norms(self) -> List[float]:
        return [float(np.linalg.norm(term, 2)) for term in self.terms]

    def block_norms(self) -> List[Tuple[float, float, float, float]]:
        """(‖DD‖, ‖DΩ‖, ‖ΩD‖, ‖ΩΩ‖) per order."""
        n = self.terms[0].shape[0] - 1
        rows = []
        for term in self.terms:
            rows.append(
                (
                    float(np.linalg.norm(term[:n, :n], 2)),
                    float(np.linalg.norm(term[:n, n:])),
                    float(np.linalg.norm(term[n:, :n])),
                    float(abs(term[n, n])),
                )
            )
        return rows


@dataclass(frozen=True)
class CorrectionMatrix:
    """First-order correction E with blocks E₁₁ (N×N), E₁₂, E₂₁ and E₂₂ (1×1)."""

    E: np.ndarray

    @property
    def resonator_count(self) -> int:
        return self.E.shape[0] - 1

    @property
    def E11(self) -> np.ndarray:
        n = self.resonator_count
        return self.E[:n, :n]

    @property
    def E12(self) -> np.ndarray:
        n = self.resonator_count
        return self.E[:n, n:]

    @property
    def E21(self) -> np.ndarray:
        n = self.resonator_count
        return self.E[n:, :n]

    @property
    def E22(self) -> np.ndarray:
        n = self.resonator_count
        return self.E[n:, n:]


class _TermGenerator:
    """Yields order-n terms by applying T_D and T_Ω once per order."""

    def __init__(self, blocks: BlockSingleLayer):
        self.blocks = blocks
        self.u_D = blocks.solve_D(blocks.F_D)
        self.u_O = blocks.solve_O(blocks.f_O)
        # Fixed left factors of the mixed terms
        self.left_DO = -blocks.solve_D(blocks.S_DO).T @ blocks.F_D
        self.left_OD = -blocks.solve_O(blocks.S_OD).T @ blocks.f_O

    def __iter__(self):
        blocks = self.blocks
        while True:
            DD = blocks.F_D.T @ self.u_D
            DO = self.left_DO.T @ self.u_O
            OD = self.left_OD.T @ self.u_D
            OO = blocks.f_O.T @ self.u_O
            yield np.block([[DD, DO], [OD, OO]])
            self.u_D = blocks.apply_T_D(self.u_D)
            self.u_O = blocks.apply_T_O(self.u_O)


def _labels(blocks: BlockSingleLayer) -> Tuple[str, ...]:
    return body_labels(blocks.resonator_count, with_defect=True)


def capacitance_expansion(blocks: BlockSingleLayer, n_max: int) -> ExpansionResult:
    """
    Terms of C̃ up to order ``n_max`` in the reflection operators.

    Order n holds ∫_{∂D_i} T_D^n S_D⁻¹[χ_j] on the resonator block,
    -∫_{∂D_i} S_D⁻¹S_{D,Ω}T_Ω^n S_Ω⁻¹[χ_Ω] and its transpose on the mixed entries, and
    ∫_{∂Ω} T_Ω^n S_Ω⁻¹[χ_Ω] on the defect entry. Order 0 carries C on the resonator block.

    Raises:
        DivergenceError: If the spectral radius of T_D is at least 1
        ValueError: If ``n_max`` is negative
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    require_convergent(blocks)

    terms = []
    for order, term in enumerate(_TermGenerator(blocks)):
        terms.append(term)
        if order == n_max:
            break
    return ExpansionResult(order=n_max, terms=tuple(terms), labels=_labels(blocks))


def first_order_correction(blocks: BlockSingleLayer) -> CorrectionMatrix:
    """E: the order-one term (T_D S_D⁻¹, -S_D⁻¹S_{D,Ω}T_Ω S_Ω⁻¹, transpose, T_Ω S_Ω⁻¹)."""
    return CorrectionMatrix(capacitance_expansion(blocks, 1).terms[1])


def zeroth_order_coupling(blocks: BlockSingleLayer) -> np.ndarray:
    """Order-zero mixed and defect entries, with the resonator block zeroed."""
    term = capacitance_expansion(blocks, 0).terms[0].copy()
    n = blocks.resonator_count
    term[:n, :n] = 0.0
    return term


def neumann_partial_sum(blocks: BlockSingleLayer, K: int) -> np.ndarray:
    """
    P_{2K}: the first 2K summands of the alternating block Neumann series for S̃⁻¹.

    Diagonal blocks hold Σ_{n<K} T_D^n S_D⁻¹ and Σ_{n<K} T_Ω^n S_Ω⁻¹; the off-diagonal blocks
    are -S_D⁻¹S_{D,Ω} and -S_Ω⁻¹S_{Ω,D} applied to the opposite geometric sum.

    Raises:
        DivergenceError: If the spectral radius of T_D is at least 1
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    require_convergent(blocks)

    term_D = blocks.solve_D(np.eye(blocks.S_D.shape[0]))
    term_O = blocks.solve_O(np.eye(blocks.S_O.shape[0]))
    sum_D = np.zeros_like(term_D)
    sum_O = np.zeros_like(term_O)
    for _ in range(K):
        sum_D += term_D
        sum_O += term_O
        term_D = blocks.apply_T_D(term_D)
        term_O = blocks.apply_T_O(term_O)

    upper = -blocks.solve_D(blocks.S_DO @ sum_O)
    lower = -blocks.solve_O(blocks.S_OD @ sum_D)
    return np.block([[sum_D, upper], [lower, sum_O]])


@dataclass(frozen=True)
class TruncationReport:
    """Spectral-norm errors of P_{2K} against the dense inverse."""

    errors: Tuple[Tuple[int, float], ...]
    block_diagonal_error: float
    fitted_ratio: Optional[float]
    reference_ratio: float
    monotone: bool
    roundoff_floor: float = field(default=0.0)

    def as_rows(self) -> List[Tuple[int, float]]:
        return list(self.errors)


def truncation_report(blocks: BlockSingleLayer, K_max: int) -> TruncationReport:
    """
    Compare P_{2K}, K = 1..K_max, with the dense inverse of the full single layer.

    The geometric ratio is fitted only over errors above the roundoff floor; the
    reference ratio is |∂Ω|^{1/2}/d.
    """
    if K_max < 1:
        raise ValueError(f"K_max must be >= 1, got {K_max}")

    full = blocks.full_matrix
    inverse = np.linalg.inv(full)
    scale = np.linalg.norm(inverse, 2)
    floor = ROUNDOFF_FACTOR * np.finfo(float).eps * scale

    errors = []
    for K in range(1, K_max + 1):
        error = float(np.linalg.norm(inverse - neumann_partial_sum(blocks, K), 2))
        errors.append((K, error))
        logger.debug(f"P_2K truncation K={K}: error {error:.3e}")

    split = blocks.S_D.shape[0]
    block_diagonal = np.zeros_like(inverse)
    block_diagonal[:split, :split] = blocks.solve_D(np.eye(split))
    block_diagonal[split:, split:] = blocks.solve_O(np.eye(full.shape[0] - split))
    block_diagonal_error = float(np.linalg.norm(inverse - block_diagonal, 2))

    values = [error for _, error in errors]
    resolved = [e for e in values if e > floor]
    fitted = geometric_ratio(resolved) if len(resolved) >= 2 else None
    monotone = all(b <= a * (1 + 1e-8) + floor for a, b in zip(values, values[1:]))

    return TruncationReport(
        errors=tuple(errors),
        block_diagonal_error=block_diagonal_error,
        fitted_ratio=fitted,
        reference_ratio=regime_ratio(blocks.scene).ratio,
        monotone=monotone,
        roundoff_floor=floor,
    )
