"""Noise ensembles: repeated noisy measurements followed by a full descent."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from ..errors import ResonatorError
from .descent import DescentConfig, steepest_descent
from .loss import LossFunction, NoiseModel, SpectrumLike, noisy_measurements

logger = logging.getLogger(__name__)

QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class DrawResult:
    """Outcome of one noisy measurement and its descent."""

    level: float
    draw: int
    start: Tuple[float, ...]
    final_point: Optional[Tuple[float, ...]]
    final_loss: float
    error: float
    status: str
    message: str = ""

    @property
    def succeeded(self) -> bool:
        return self.status == "completed"


@dataclass(frozen=True)
class LevelSummary:
    """Localization-error statistics of the successful draws at one noise level."""

    level: float
    draws: int
    failures: int
    median: float
    quantiles: Dict[float, float]


@dataclass
class MonteCarloReport:
    """All draws of one scene variant, grouped by noise level."""

    label: str
    truth: Tuple[float, ...]
    seed: int
    draws: List[DrawResult] = field(default_factory=list)

    @property
    def levels(self) -> List[float]:
        return sorted({d.level for d in self.draws})

    def summary(self) -> List[LevelSummary]:
        rows = []
        for level in self.levels:
            results = [d for d in self.draws if d.level == level]
            errors = np.array([d.error for d in results if d.succeeded])
            if errors.size:
                median = float(np.median(errors))
                quantiles = {q: float(np.quantile(errors, q)) for q in QUANTILES}
            else:
                median, quantiles = float("nan"), {q: float("nan") for q in QUANTILES}
            rows.append(
                LevelSummary(
                    level=level,
                    draws=len(results),
                    failures=sum(not d.succeeded for d in results),
                    median=median,
                    quantiles=quantiles,
                )
            )
        return rows

    def medians(self) -> Dict[float, float]:
        return {row.level: row.median for row in self.summary()}


def _run_draw(
    objective: LossFunction,
    measured: SpectrumLike,
    truth: np.ndarray,
    start: np.ndarray,
    level: float,
    draw: int,
    seed_sequence: np.random.SeedSequence,
    config: DescentConfig,
) -> DrawResult:
    rng = np.random.default_rng(seed_sequence)
    try:
        noisy = noisy_measurements(measured, NoiseModel(level, draws=1), rng=rng)
        trace = steepest_descent(objective.with_measured(noisy), start, config)
    except ResonatorError as e:
        logger.warning(f"Draw {draw} at noise {level:g} failed: {e}")
        return DrawResult(level, draw, tuple(start), None, float("nan"), float("nan"), "failed", str(e))

    if not trace.points:
        return DrawResult(
            level, draw, tuple(start), None, float("nan"), float("nan"), trace.status, trace.message
        )
    final = trace.final_point
    return DrawResult(
        level=level,
        draw=draw,
        start=tuple(start),
        final_point=tuple(float(v) for v in final),
        final_loss=float(trace.final_loss),
        error=float(np.linalg.norm(final - truth)),
        status=trace.status,
        message=trace.message,
    )


def monte_carlo(
    objective: LossFunction,
    truth: Sequence[float],
    starts: Sequence[Sequence[float]],
    levels: Sequence[float],
    config: Optional[DescentConfig] = None,
    draws: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    label: str = "scene",
) -> MonteCarloReport:
    """
    For every noise level and draw: perturb the noiseless spectrum at ``truth``, descend
    from a start point and record ‖p_final - p_truth‖.

    Draw d uses ``starts[d % len(starts)]``. Each (level, draw) gets its own stream spawned
    from one SeedSequence, so the report does not depend on ``workers``.
    """
    if not levels:
        raise ValueError("Monte Carlo needs at least one noise level")
    if not starts:
        raise ValueError("Monte Carlo needs at least one start point")
    config = config or DescentConfig()
    draws = Config.NOISE_DRAWS if draws is None else draws
    seed = Config.DEFAULT_SEED if seed is None else seed

    truth = np.asarray(truth, dtype=float)
    measured = objective.model.resonances(objective.space.to_params(truth))
    streams = np.random.SeedSequence(seed).spawn(len(levels) * draws)

    jobs = []
    for i, level in enumerate(levels):
        for d in range(draws):
            start = np.asarray(starts[d % len(starts)], dtype=float)
            jobs.append((level, d, start, streams[i * draws + d]))

    def run(job) -> DrawResult:
        level, d, start, stream = job
        return _run_draw(objective, measured, truth, start, level, d, stream, config)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    report = MonteCarloReport(label=label, truth=tuple(truth), seed=seed, draws=results)
    for row in report.summary():
        logger.info(
            f"[{label}] noise {row.level:g}: median error {row.median:.3e}, "
            f"{row.failures}/{row.draws} failed"
        )
    return report
