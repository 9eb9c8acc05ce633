"""Resonance mismatch losses and multiplicative measurement noise."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..config import Config
from .models import DefectParams, ForwardModel, MeasuredSpectrum, ParameterSpace

logger = logging.getLogger(__name__)

SpectrumLike = Union[MeasuredSpectrum, Sequence[complex], np.ndarray]


def _values(spectrum: SpectrumLike) -> np.ndarray:
    if isinstance(spectrum, MeasuredSpectrum):
        return spectrum.values
    return np.asarray(spectrum, dtype=complex)


def spectral_mismatch(
    measured: SpectrumLike,
    predicted: SpectrumLike,
    alpha: Optional[Sequence[float]] = None,
    clusters: Sequence[Tuple[int, ...]] = (),
) -> float:
    """
    Σ_j α_j |ω_j^mes - ω_j|², minimized over permutations inside each cluster.

    Raises:
        ValueError: If the lengths of the spectra and weights differ
    """
    measured = _values(measured)
    predicted = _values(predicted)
    if measured.shape != predicted.shape:
        raise ValueError(
            f"Spectrum length mismatch: {len(measured)} measured, {len(predicted)} predicted"
        )
    alpha = np.ones(len(measured)) if alpha is None else np.asarray(alpha, dtype=float)
    if alpha.shape != measured.shape:
        raise ValueError(f"Expected {len(measured)} loss weights, got {len(alpha)}")

    terms = alpha * np.abs(measured - predicted) ** 2
    total = float(np.sum(terms))
    for group in clusters:
        group = list(group)
        best = min(
            float(np.sum(alpha[group] * np.abs(measured[group] - predicted[list(perm)]) ** 2))
            for perm in itertools.permutations(group)
        )
        total += best - float(np.sum(terms[group]))
    return max(total, 0.0)


def loss(
    params: DefectParams,
    measured: SpectrumLike,
    model: ForwardModel,
    alpha: Optional[Sequence[float]] = None,
) -> float:
    """ℓ^α(p) = Σ_j α_j |ω_j^mes - ω_j(p)|² with α ≡ 1 by default."""
    return spectral_mismatch(measured, model.resonances(params), alpha, model.clusters)


@dataclass
class LossFunction:
    """Loss as a function of the free coordinates of ``space``."""

    model: ForwardModel
    measured: SpectrumLike
    space: ParameterSpace
    alpha: Optional[Sequence[float]] = None
    evaluations: int = field(default=0, init=False)

    def __call__(self, vector: Sequence[float]) -> float:
        self.evaluations += 1
        return loss(self.space.to_params(vector), self.measured, self.model, self.alpha)

    def with_measured(self, measured: SpectrumLike) -> "LossFunction":
        return LossFunction(self.model, measured, self.space, self.alpha)


@dataclass(frozen=True)
class NoiseModel:
    """Relative noise η_j ~ U[-ε, ε] applied as (1 + η_j)·ω_j."""

    epsilon: float
    draws: int = field(default_factory=lambda: Config.NOISE_DRAWS)
    seed: int = field(default_factory=lambda: Config.DEFAULT_SEED)

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError(f"Noise level must be >= 0, got {self.epsilon}")
        if self.draws < 1:
            raise ValueError(f"Noise draws must be >= 1, got {self.draws}")


def noisy_measurements(
    measured: SpectrumLike,
    noise: NoiseModel,
    rng: Optional[np.random.Generator] = None,
) -> MeasuredSpectrum:
    """
    Multiply each resonance by 1 + η_j with η_j i.i.d. uniform on [-ε, ε].

    Without ``rng`` a generator seeded from ``noise.seed`` is used, so repeated calls agree.
    """
    values = _values(measured)
    if noise.epsilon == 0:
        return MeasuredSpectrum(values.copy())
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    eta = rng.uniform(-noise.epsilon, noise.epsilon, size=len(values))
    return MeasuredSpectrum((1.0 + eta) * values)
