"""Loss landscapes on a grid of defect positions."""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from ..errors import ResonatorError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossMap:
    """ℓ on the grid xs × ys; ``values[i, j]`` belongs to (xs[i], ys[j]), NaN where invalid."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    @property
    def invalid(self) -> np.ndarray:
        return ~np.isfinite(self.values)

    def log10(self) -> np.ndarray:
        """log₁₀ ℓ; zero losses map to -inf, invalid cells stay NaN."""
        with np.errstate(divide="ignore"):
            return np.log10(self.values)

    def minimum(self) -> Tuple[float, float, float]:
        """(x, y, ℓ) at the smallest finite value."""
        masked = np.where(self.invalid, np.inf, self.values)
        i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        return float(self.xs[i]), float(self.ys[j]), float(self.values[i, j])

    def dynamic_range(self) -> float:
        """Orders of magnitude between the largest and smallest positive finite values."""
        finite = self.values[np.isfinite(self.values) & (self.values > 0)]
        if finite.size == 0:
            return 0.0
        return float(np.log10(finite.max() / finite.min()))


def parse_axis(spec: str) -> np.ndarray:
    """``"a:b:n"`` -> n evenly spaced points from a to b."""
    try:
        start, stop, count = spec.split(":")
        points = np.linspace(float(start), float(stop), int(count))
    except ValueError as e:
        raise ValueError(f"Invalid grid axis '{spec}' (expected start:stop:count)") from e
    if points.size == 0:
        raise ValueError(f"Grid axis '{spec}' is empty")
    return points


def loss_map(
    objective: Callable[[np.ndarray], float],
    xs: Sequence[float],
    ys: Sequence[float],
) -> LossMap:
    """Evaluate ``objective`` at every (x, y); failing cells are recorded as NaN."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    values = np.full((xs.size, ys.size), np.nan)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            try:
                values[i, j] = objective(np.array([x, y]))
            except (ResonatorError, ValueError) as e:
                logger.debug(f"Loss map cell ({x:.4f}, {y:.4f}) invalid: {e}")

    invalid = int(np.count_nonzero(~np.isfinite(values)))
    if invalid:
        logger.warning(f"Loss map: {invalid} of {values.size} cells invalid")
    return LossMap(xs, ys, values)
