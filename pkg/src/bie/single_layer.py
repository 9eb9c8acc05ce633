"""Galerkin discretization of the Laplace single-layer operator on unions of spheres."""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from ..config import Config
from ..errors import (
    DefectTooSmallError,
    DiscretizationError,
    IllConditionedError,
    MissingDefectError,
    OverlapError,
    SceneError,
)
from ..geometry import ResonatorScene, Sphere
from .harmonics import (
    harmonic_count,
    harmonic_degrees,
    real_harmonics,
    sphere_quadrature,
    unit_directions,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class DiscretizationConfig:
    """
    Spherical-harmonic truncation and quadrature order.

    ``quadrature_order`` left as None resolves to ``Config.quadrature_order_for(max_degree)``.
    """

    max_degree: int = field(default_factory=lambda: Config.MAX_DEGREE)
    quadrature_order: Optional[int] = None

    def __post_init__(self):
        if self.max_degree < 0:
            raise DiscretizationError(f"max_degree must be >= 0, got {self.max_degree}")
        if self.quadrature_order is None:
            object.__setattr__(
                self, "quadrature_order", Config.quadrature_order_for(self.max_degree)
            )
        if self.quadrature_order < self.max_degree + 1:
            raise DiscretizationError(
                f"quadrature_order {self.quadrature_order} below max_degree + 1 "
                f"= {self.max_degree + 1}"
            )

    @property
    def basis_size(self) -> int:
        """Basis functions per sphere."""
        return harmonic_count(self.max_degree)


@dataclass(frozen=True)
class DensityVector:
    """Surface density expanded in the per-body harmonic bases."""

    coefficients: np.ndarray
    offsets: Tuple[Tuple[int, int], ...]
    radii: Tuple[float, ...]

    def block(self, body_index: int) -> np.ndarray:
        start, stop = self.offsets[body_index]
        return self.coefficients[start:stop]

    @property
    def body_count(self) -> int:
        return len(self.offsets)


class GalerkinOperator:
    """
    Dense Galerkin matrix ⟨S[b_q], b_p⟩ of the single layer on a union of spheres.

    The basis on sphere B is b = Y_n^m(x̂)/R, orthonormal in L²(∂B), so the gram matrix is
    the identity. The matrix is immutable after assembly; its Cholesky factor is computed
    on first use and shared by all readers.
    """

    def __init__(self, matrix: np.ndarray, spheres: Sequence[Sphere], config: DiscretizationConfig):
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self.spheres = tuple(spheres)
        self.config = config

        size = config.basis_size
        self.offsets = tuple((i * size, (i + 1) * size) for i in range(len(self.spheres)))

        self._lock = threading.Lock()
        self._factor = None
        self._condition: Optional[float] = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def body_count(self) -> int:
        return len(self.spheres)

    @property
    def gram(self) -> np.ndarray:
        """Mass matrix of the basis in surface L²."""
        return np.eye(self.size)

    @property
    def radii(self) -> Tuple[float, ...]:
        return tuple(s.radius for s in self.spheres)

    def body_slice(self, body_index: int) -> slice:
        self._check_index(body_index)
        start, stop = self.offsets[body_index]
        return slice(start, stop)

    def _check_index(self, body_index: int) -> None:
        if not 0 <= body_index < self.body_count:
            raise DiscretizationError(
                f"Body index {body_index} out of range for {self.body_count} bodies"
            )

    def condition_number(self) -> float:
        """2-norm condition number (the matrix is symmetric positive definite)."""
        with self._lock:
            if self._condition is None:
                eigenvalues = np.linalg.eigvalsh(self.matrix)
                smallest = eigenvalues[0]
                self._condition = np.inf if smallest <= 0 else float(eigenvalues[-1] / smallest)
            return self._condition

    def factor(self):
        """Cached Cholesky factorization."""
        with self._lock:
            if self._factor is None:
                try:
                    self._factor = cho_factor(self.matrix)
                except np.linalg.LinAlgError as e:
                    raise IllConditionedError(f"Galerkin matrix is not positive definite: {e}") from e
            return self._factor

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Apply the inverse Galerkin matrix to a vector or a block of columns."""
        condition = self.condition_number()
        if condition > Config.CONDITION_LIMIT:
            raise IllConditionedError(
                f"Galerkin matrix condition {condition:.3e} exceeds {Config.CONDITION_LIMIT:.1e}"
            )
        return cho_solve(self.factor(), rhs)

    def density(self, coefficients: np.ndarray) -> DensityVector:
        return DensityVector(np.asarray(coefficients), self.offsets, self.radii)

    def dump(self, path: Union[str, Path]) -> Path:
        """Write the matrix as ``.npy`` or ``.csv`` depending on the suffix."""
        path = Path(path)
        suffix = path.suffix.lower()
        if suffix == ".npy":
            np.save(path, self.matrix)
        elif suffix == ".csv":
            np.savetxt(path, self.matrix, delimiter=",", fmt="%.17g")
        else:
            raise ValueError(f"Unsupported operator dump format '{suffix}' (use .npy or .csv)")
        logger.info(f"Dumped {self.size}x{self.size} Galerkin matrix to {path}")
        return path


class SingleLayerAssembler:
    """
    Assemble Galerkin matrices, caching cross blocks between sphere pairs.

    Moving only the defect reuses every resonator-resonator block, so repeated forward
    evaluations assemble just one block row.
    """

    def __init__(self, config: Optional[DiscretizationConfig] = None, cache_size: int = 256):
        self.config = config or DiscretizationConfig()
        self.cache_size = cache_size
        self._cache: "OrderedDict[Tuple[Sphere, Sphere], np.ndarray]" = OrderedDict()
        self._lock = threading.Lock()

        theta, phi, weights = sphere_quadrature(self.config.quadrature_order)
        self._directions = unit_directions(theta, phi)
        self._harmonics = real_harmonics(self.config.max_degree, theta, phi)
        self._weights = weights
        self._self_diagonal = 1.0 / (2 * harmonic_degrees(self.config.max_degree) + 1)

    def _self_block(self, sphere: Sphere) -> np.ndarray:
        return np.diag(sphere.radius * self._self_diagonal)

    def _cross_block(self, first: Sphere, second: Sphere) -> np.ndarray:
        key = (first, second)
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                return self._cache[key]

        # b = Y/R against dσ = R² dΩ leaves a factor R per side
        points_a = first.position + first.radius * self._directions
        points_b = second.position + second.radius * self._directions
        kernel = 1.0 / (4.0 * np.pi * cdist(points_a, points_b))
        weighted_a = self._harmonics * (first.radius * self._weights)[:, None]
        weighted_b = self._harmonics * (second.radius * self._weights)[:, None]
        block = weighted_a.T @ kernel @ weighted_b

        with self._lock:
            self._cache[key] = block
            while len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        return block

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()

    @staticmethod
    def _check_spheres(spheres: Sequence[Sphere]) -> None:
        for index, sphere in enumerate(spheres):
            if not np.isfinite(sphere.radius) or sphere.radius <= 0:
                raise SceneError(f"Sphere {index + 1} has invalid radius {sphere.radius}")
            if sphere.radius < Config.MIN_DEFECT_RADIUS:
                raise DefectTooSmallError(
                    f"Sphere {index + 1} radius {sphere.radius:.3e} below "
                    f"{Config.MIN_DEFECT_RADIUS:.1e}"
                )
        for i in range(len(spheres)):
            for j in range(i + 1, len(spheres)):
                gap = spheres[i].gap_to(spheres[j])
                if gap <= 0:
                    raise OverlapError(
                        f"Overlapping bodies: sphere {i + 1} and sphere {j + 1} (gap {gap:.3e})"
                    )

    def assemble(self, spheres: Sequence[Sphere]) -> GalerkinOperator:
        """
        Assemble the Galerkin matrix for ``spheres``.

        Args:
            spheres: Pairwise disjoint spheres, in body order

        Returns:
            GalerkinOperator of size B·(L+1)²

        Raises:
            OverlapError: If two spheres touch or intersect
            DefectTooSmallError: If a radius is below the supported minimum
        """
        spheres = list(spheres)
        if not spheres:
            raise SceneError("Cannot assemble an operator on zero bodies")
        self._check_spheres(spheres)

        size = self.config.basis_size
        matrix = np.empty((len(spheres) * size, len(spheres) * size))
        for i, first in enumerate(spheres):
            rows = slice(i * size, (i + 1) * size)
            matrix[rows, rows] = self._self_block(first)
            for j in range(i + 1, len(spheres)):
                cols = slice(j * size, (j + 1) * size)
                block = self._cross_block(first, spheres[j])
                matrix[rows, cols] = block
                matrix[cols, rows] = block.T

        logger.debug(
            f"Assembled single layer: {len(spheres)} bodies, L={self.config.max_degree}, "
            f"size {matrix.shape[0]}"
        )
        return GalerkinOperator(matrix, spheres, self.config)


_assemblers: Dict[DiscretizationConfig, SingleLayerAssembler] = {}
_assemblers_lock = threading.Lock()


def get_assembler(config: Optional[DiscretizationConfig] = None) -> SingleLayerAssembler:
    """Shared assembler per discretization config."""
    config = config or DiscretizationConfig()
    with _assemblers_lock:
        if config not in _assemblers:
            _assemblers[config] = SingleLayerAssembler(config)
        return _assemblers[config]


def assemble_single_layer(
    bodies: Sequence[Sphere],
    config: Optional[DiscretizationConfig] = None,
) -> GalerkinOperator:
    """Assemble the single-layer Galerkin operator on ``bodies``."""
    return get_assembler(config).assemble(bodies)


def solve_density(op: GalerkinOperator, rhs: DensityVector) -> DensityVector:
    """
    Coefficients of S⁻¹ applied to the function whose load vector is ``rhs``.

    Raises:
        IllConditionedError: If the condition number exceeds ``Config.CONDITION_LIMIT`` or
            the relative residual exceeds 1e-10
    """
    load = np.asarray(rhs.coefficients)
    coefficients = op.solve(load)

    scale = np.linalg.norm(load)
    if scale > 0:
        residual = np.linalg.norm(op.matrix @ coefficients - load) / scale
        if residual > RESIDUAL_TOLERANCE:
            raise IllConditionedError(f"Density solve residual {residual:.3e} too large")
    return op.density(coefficients)


def indicator_rhs(op: GalerkinOperator, body_index: int) -> DensityVector:
    """Load vector of χ_{∂B_j}: √(4π)·R_j on the degree-0 entry of body j."""
    op._check_index(body_index)
    load = np.zeros(op.size)
    load[op.offsets[body_index][0]] = np.sqrt(4.0 * np.pi) * op.spheres[body_index].radius
    return op.density(load)


def indicator_matrix(op: GalerkinOperator, body_indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """Columns of indicator load vectors, one per body in ``body_indices``."""
    if body_indices is None:
        body_indices = range(op.body_count)
    columns = [indicator_rhs(op, j).coefficients for j in body_indices]
    return np.column_stack(columns)


def boundary_integral(density: DensityVector, body_index: int) -> complex:
    """∫_{∂B_i} φ dσ, i.e. √(4π)·R_i times the degree-0 coefficient."""
    if not 0 <= body_index < density.body_count:
        raise DiscretizationError(
            f"Body index {body_index} out of range for {density.body_count} bodies"
        )
    value = np.sqrt(4.0 * np.pi) * density.radii[body_index] * density.block(body_index)[0]
    return value.item() if hasattr(value, "item") else value


@dataclass(frozen=True)
class BlockPartition:
    """Resonator/defect split of a Galerkin matrix."""

    S_D: np.ndarray
    S_DO: np.ndarray
    S_OD: np.ndarray
    S_O: np.ndarray

    def reassemble(self) -> np.ndarray:
        return np.block([[self.S_D, self.S_DO], [self.S_OD, self.S_O]])


def block_partition(op: GalerkinOperator, scene: ResonatorScene) -> BlockPartition:
    """
    Split ``op`` into (S_D, S_{D,Ω}, S_{Ω,D}, S_Ω).

    Raises:
        MissingDefectError: If ``scene`` has no defect
        DiscretizationError: If ``op`` was not assembled on the N+1 bodies of ``scene``
    """
    if not scene.has_defect:
        raise MissingDefectError("Block partition requires a defect")
    if op.body_count != scene.size + 1:
        raise DiscretizationError(
            f"Operator has {op.body_count} bodies, scene has {scene.size + 1}"
        )

    split = op.offsets[-1][0]
    matrix = op.matrix
    return BlockPartition(
        S_D=matrix[:split, :split],
        S_DO=matrix[:split, split:],
        S_OD=matrix[split:, :split],
        S_O=matrix[split:, split:],
    )
