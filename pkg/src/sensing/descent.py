"""Central-difference gradients and steepest descent on the defect loss."""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from ..errors import InvalidDefectError, ResonatorError

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]

SCHEDULES = ("geometric", "constant")
STEP_SIZES = ("barzilai-borwein", "polyak", "raw")


def _evaluate(objective: Objective, point: np.ndarray) -> float:
    value = objective(point)
    if not np.isfinite(value):
        raise InvalidDefectError(f"Non-finite loss at {point}")
    return value


def gradient_fd(objective: Objective, point: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """
    Central differences (ℓ(p + h e_i) - ℓ(p - h e_i)) / 2h for every coordinate.

    An invalid sample point shrinks h by a factor 10 once for that coordinate.

    Raises:
        InvalidDefectError: If a sample is still invalid after shrinking
    """
    if h is None:
        h = Config.FD_STEP
    if h <= 0:
        raise ValueError(f"Finite-difference step must be > 0, got {h}")

    point = np.asarray(point, dtype=float)
    gradient = np.zeros_like(point)
    for i in range(point.size):
        step = h
        for attempt in range(2):
            offset = np.zeros_like(point)
            offset[i] = step
            try:
                forward = _evaluate(objective, point + offset)
                backward = _evaluate(objective, point - offset)
            except (ResonatorError, ValueError) as e:
                if attempt == 1:
                    raise InvalidDefectError(
                        f"Invalid sample around {point} along coordinate {i} (h={step:.1e}): {e}"
                    ) from e
                logger.debug(f"Sample failed along coordinate {i}, shrinking h to {step / 10:.1e}")
                step /= 10.0
                continue
            gradient[i] = (forward - backward) / (2.0 * step)
            break
    return gradient


@dataclass(frozen=True)
class DescentConfig:
    """
    Step schedule of the descent.

    ``schedule`` "geometric" uses the rate λ^k at iteration k, "constant" uses λ.

    ``step_size`` picks the distance moved along -∇ℓ/‖∇ℓ‖:

    - "barzilai-borwein": sᵀs/sᵀy·‖∇ℓ‖ from the last step s and gradient change y, with
      ℓ/‖∇ℓ‖ on the first step and whenever sᵀy ≤ 0;
    - "polyak": ℓ/‖∇ℓ‖, which assumes a zero minimum;
    - "raw": the literal update p - rate·∇ℓ, without safeguards.

    Except for "raw" the distance is capped at rate·``max_step`` and halved up to
    ``max_backtracks`` times until the loss does not increase; a step that never
    passes leaves the point in place.
    """

    step: float = field(default_factory=lambda: Config.DESCENT_STEP)
    iterations: int = field(default_factory=lambda: Config.DESCENT_ITERATIONS)
    fd_step: float = field(default_factory=lambda: Config.FD_STEP)
    plane_restriction: bool = True
    schedule: str = "geometric"
    step_size: str = "barzilai-borwein"
    max_step: float = 0.5
    max_backtracks: int = 10

    def __post_init__(self):
        if not 0 < self.step <= 1:
            raise ValueError(f"Descent step must lie in (0, 1], got {self.step}")
        if self.iterations < 0:
            raise ValueError(f"Iterations must be >= 0, got {self.iterations}")
        if self.fd_step <= 0:
            raise ValueError(f"fd_step must be > 0, got {self.fd_step}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"Unknown schedule '{self.schedule}' (use {SCHEDULES})")
        if self.step_size not in STEP_SIZES:
            raise ValueError(f"Unknown step size rule '{self.step_size}' (use {STEP_SIZES})")
        if self.max_step <= 0:
            raise ValueError(f"max_step must be > 0, got {self.max_step}")
        if self.max_backtracks < 0:
            raise ValueError(f"max_backtracks must be >= 0, got {self.max_backtracks}")

    def rate(self, k: int) -> float:
        return self.step**k if self.schedule == "geometric" else self.step


@dataclass
class DescentTrace:
    """Iterates p_k and losses ℓ(p_k); ``status`` is "completed" or "stopped"."""

    points: List[np.ndarray] = field(default_factory=list)
    losses: List[float] = field(default_factory=list)
    status: str = "completed"
    message: str = ""

    def __len__(self) -> int:
        return len(self.points)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    @property
    def initial_loss(self) -> float:
        return self.losses[0]

    @property
    def final_loss(self) -> float:
        return self.losses[-1]

    @property
    def final_point(self) -> np.ndarray:
        return self.points[-1]


def _reflect(point: np.ndarray, plane_restriction: bool) -> np.ndarray:
    point = np.array(point, dtype=float)
    if plane_restriction and point.size >= 2:
        point[1] = abs(point[1])
    return point


def _step_length(
    config: DescentConfig,
    k: int,
    point: np.ndarray,
    value: float,
    gradient: np.ndarray,
    previous: Optional[Tuple[np.ndarray, np.ndarray]],
) -> float:
    norm = float(np.linalg.norm(gradient))
    if norm == 0 or value == 0:
        return 0.0
    length = value / norm
    if config.step_size == "barzilai-borwein" and previous is not None:
        s = point - previous[0]
        y = gradient - previous[1]
        curvature = float(s @ y)
        if curvature > 0:
            length = float(s @ s) / curvature * norm
    return min(length, config.rate(k) * config.max_step)


def _safeguarded_step(
    objective: Objective,
    point: np.ndarray,
    value: float,
    gradient: np.ndarray,
    length: float,
    config: DescentConfig,
) -> Tuple[np.ndarray, float, bool]:
    """(point, loss, mirrored) after the longest halving of ``length`` that does not raise ℓ."""
    if length == 0:
        return point, value, False
    direction = -gradient / np.linalg.norm(gradient)
    for _ in range(config.max_backtracks + 1):
        target = point + length * direction
        candidate = _reflect(target, config.plane_restriction)
        try:
            candidate_value = _evaluate(objective, candidate)
        except (ResonatorError, ValueError) as e:
            logger.debug(f"Rejected step of length {length:.3e}: {e}")
            candidate_value = np.inf
        if candidate_value <= value:
            return candidate, candidate_value, bool(np.any(candidate != target))
        length *= 0.5
    logger.debug(f"No decrease within {config.max_backtracks} halvings at {point}")
    return point, value, False


def steepest_descent(
    objective: Objective,
    start: Sequence[float],
    config: Optional[DescentConfig] = None,
) -> DescentTrace:
    """
    Run ``config.iterations`` steps p_{k+1} = p_k - s_k ∇ℓ(p_k) from ``start``.

    An invalid start or a failed gradient stops the run; the partial trace is returned with
    status "stopped". Invalid or uphill trial points only shorten the step.

    Args:
        objective: Loss of the free coordinates
        start: Initial coordinates
        config: Step schedule (defaults from Config)

    Returns:
        DescentTrace with iterations + 1 entries when completed
    """
    config = config or DescentConfig()
    trace = DescentTrace()

    point = _reflect(start, config.plane_restriction)
    try:
        value = _evaluate(objective, point)
    except (ResonatorError, ValueError) as e:
        trace.status, trace.message = "stopped", f"Invalid start: {e}"
        logger.warning(f"Descent not started: {e}")
        return trace
    trace.points.append(point)
    trace.losses.append(value)

    previous: Optional[Tuple[np.ndarray, np.ndarray]] = None
    for k in range(config.iterations):
        try:
            gradient = gradient_fd(objective, point, config.fd_step)
            if config.step_size == "raw":
                candidate = _reflect(point - config.rate(k) * gradient, config.plane_restriction)
                candidate_value = _evaluate(objective, candidate)
                mirrored = False
            else:
                length = _step_length(config, k, point, value, gradient, previous)
                candidate, candidate_value, mirrored = _safeguarded_step(
                    objective, point, value, gradient, length, config
                )
        except (ResonatorError, ValueError) as e:
            trace.status, trace.message = "stopped", f"Iteration {k}: {e}"
            logger.warning(f"Descent stopped at iteration {k}: {e}")
            return trace

        if candidate is not point:
            # ℓ is even in y under the plane restriction, so mirror the memory with the step
            memory = (point.copy(), gradient.copy())
            if mirrored:
                memory[0][1] = -memory[0][1]
                memory[1][1] = -memory[1][1]
            previous = memory
        point, value = candidate, candidate_value
        trace.points.append(point)
        trace.losses.append(value)
        logger.debug(f"Descent k={k}: loss {value:.3e}, |grad| {np.linalg.norm(gradient):.3e}")

    logger.debug(
        f"Descent finished: loss {trace.initial_loss:.3e} -> {trace.final_loss:.3e}"
    )
    return trace
