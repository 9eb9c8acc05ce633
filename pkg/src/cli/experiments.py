"""Experiment drivers behind the CLI subcommands; every run writes data files and a manifest."""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .. import __version__
from ..bie import DiscretizationConfig, assemble_single_layer
from ..capacitance import (
    capacitance_matrix,
    perturbed_capacitance_direct,
    weight_matrix,
    weighted_capacitance,
)
from ..config import Config
from ..errors import MissingDefectError, SceneFileError
from ..geometry import ResonatorScene, SceneFile, load_scene, save_scene, uniform_chain
from ..scattering import BlockSingleLayer, capacitance_expansion, truncation_report
from ..sensing import (
    CapacitanceForwardModel,
    DescentConfig,
    LossFunction,
    ParameterSpace,
    loss_map,
    monte_carlo,
    parse_axis,
)
from ..spectral import (
    ExceptionalPointResult,
    GainLossParameterization,
    eigenpairs,
    find_exceptional_point,
    shift_sweep,
)
from .output import write_json, write_matrix_csv, write_rows_csv

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
DEFAULT_DEFECT_CENTER = (3.0, 0.0, 0.0)
DEFAULT_DEFECT_RADIUS = 1e-4
DEFAULT_SWEEP_RADII = (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)
DEFAULT_NOISE_LEVELS = (1e-4, 1e-3)
DEFAULT_MAP_GRID = "2.5:3.5:21,0:1:11"
DEFAULT_START_GRID = "2.5:3.5:5,0:1:3"


class ExperimentSpec(BaseModel):
    """
    Inputs of one CLI run; stored verbatim in the manifest.

    ``settings`` snapshots every numeric Config value at construction; the run applies
    it again, so reruns see the recorded values whatever the environment.
    """

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    scene: Optional[Path] = None
    out: Path = Path("results")
    degree: int = Field(default_factory=lambda: Config.MAX_DEGREE, ge=0)
    seed: int = Field(default_factory=lambda: Config.DEFAULT_SEED)
    options: Dict[str, Any] = Field(default_factory=dict)
    settings: Dict[str, Any] = Field(default_factory=Config.settings)

    def discretization(self) -> DiscretizationConfig:
        return DiscretizationConfig(max_degree=self.degree)

    def out_dir(self) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out

    def option(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value


def default_scene() -> ResonatorScene:
    """Three-sphere chain with a small defect to the right of it."""
    return uniform_chain().with_defect(DEFAULT_DEFECT_CENTER, DEFAULT_DEFECT_RADIUS)


def resolve_scene(spec: ExperimentSpec) -> ResonatorScene:
    if spec.scene is None:
        logger.info("No scene file given; using the default three-sphere chain")
        return default_scene()
    return load_scene(spec.scene)


def ep_variant(
    scene: ResonatorScene,
    config: Optional[DiscretizationConfig] = None,
) -> Tuple[ResonatorScene, ExceptionalPointResult]:
    """Scene with resonator contrasts tuned to an exceptional point of the unperturbed system."""
    parameterization = GainLossParameterization.for_scene(scene)
    result = find_exceptional_point(capacitance_matrix(scene, config), parameterization)
    return parameterization.apply_to_scene(scene, result.parameters), result


def _variant(spec: ExperimentSpec, scene: ResonatorScene) -> ResonatorScene:
    if not spec.option("ep", False):
        return scene
    tuned, result = ep_variant(scene, spec.discretization())
    logger.info(f"Using EP-tuned scene: τ={result.parameters[0]:.8f}, μ={result.parameters[1]:.3e}")
    return tuned


def _require_defect(scene: ResonatorScene, subcommand: str) -> None:
    if not scene.has_defect:
        raise MissingDefectError(f"'{subcommand}' needs a scene with a defect")


def write_manifest(spec: ExperimentSpec, scene: ResonatorScene, outputs: Sequence[Path]) -> Path:
    """Record everything needed to rerun ``spec`` next to its outputs."""
    config = spec.discretization()
    manifest = {
        "version": __version__,
        "spec": spec.model_dump(mode="json"),
        "scene": SceneFile.from_scene(scene).model_dump(),
        "discretization": {
            "max_degree": config.max_degree,
            "quadrature_order": config.quadrature_order,
        },
        "seed": spec.seed,
        "outputs": [Path(p).name for p in outputs],
    }
    return write_json(spec.out_dir() / MANIFEST_NAME, manifest)


def load_manifest(path: Path) -> Tuple[ExperimentSpec, ResonatorScene]:
    """Run settings and scene stored in a manifest; the scene path is not needed to rerun."""
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        spec = ExperimentSpec.model_validate(document["spec"])
        scene = SceneFile.model_validate(document["scene"]).to_scene()
    except (OSError, KeyError, json.JSONDecodeError) as e:
        raise SceneFileError(f"Invalid manifest {path}: {e}") from e
    return spec, scene


def run_capmat(spec: ExperimentSpec, scene: ResonatorScene) -> List[Path]:
    config = spec.discretization()
    out = spec.out_dir()
    outputs = []

    C = capacitance_matrix(scene, config)
    outputs.append(write_matrix_csv(out / "capacitance.csv", C.entries, C.labels))
    if scene.has_defect:
        perturbed = perturbed_capacitance_direct(scene, config)
        outputs.append(
            write_matrix_csv(out / "perturbed_capacitance.csv", perturbed.entries, perturbed.labels)
        )

    dump = spec.option("dump_operator")
    if dump:
        operator = assemble_single_layer(scene.spheres, config)
        outputs.append(operator.dump(Path(dump)))
    return outputs


def run_spectrum(spec: ExperimentSpec, scene: ResonatorScene) -> List[Path]:
    config = spec.discretization()
    out = spec.out_dir()
    resonators = scene.without_defect()

    matrix = weighted_capacitance(capacitance_matrix(resonators, config), weight_matrix(resonators))
    rows = [
        (j + 1, pair.eigenvalue, pair.resonance, pair.condition, pair.clustered)
        for j, pair in enumerate(eigenpairs(matrix))
    ]
    outputs = [
        write_rows_csv(
            out / "spectrum.csv",
            ["index", "eigenvalue", "resonance", "condition", "clustered"],
            rows,
        )
    ]

    if spec.option("find_ep", False):
        tuned, result = ep_variant(scene, config)
        outputs.append(save_scene(tuned, out / "ep_scene.json"))
        outputs.append(
            write_json(
                out / "ep.json",
                {
                    "tau": result.parameters[0],
                    "mu": result.parameters[1],
                    "relative_gap": result.gap,
                    "condition": result.condition,
                    "eigenvalue": result.eigenvalue,
                    "resonance": complex(np.sqrt(complex(result.eigenvalue))),
                    "pair": [i + 1 for i in result.pair],
                    "iterations": result.iterations,
                },
            )
        )
    return outputs


def run_expand(spec: ExperimentSpec, scene: ResonatorScene) -> List[Path]:
    _require_defect(scene, spec.subcommand)
    out = spec.out_dir()
    order = int(spec.option("order", 1))
    if order < 0:
        raise ValueError(f"--order must be >= 0, got {order}")
    blocks = BlockSingleLayer.from_scene(scene, spec.discretization())

    expansion = capacitance_expansion(blocks, max(order, 1))
    norms = expansion.term_norms()
    block_norms = expansion.block_norms()
    rows = [(n, norms[n]) + block_norms[n] for n in range(order + 1)]
    truncated = np.sum(expansion.terms[: order + 1], axis=0)
    outputs = [
        write_rows_csv(
            out / "expansion_terms.csv",
            ["order", "norm", "norm_DD", "norm_DO", "norm_OD", "norm_OO"],
            rows,
        ),
        write_matrix_csv(out / "expansion.csv", truncated, expansion.labels),
        write_matrix_csv(out / "correction.csv", expansion.terms[1], expansion.labels),
    ]

    K = int(spec.option("report_truncation", 0))
    if K > 0:
        report = truncation_report(blocks, K)
        outputs.append(write_rows_csv(out / "truncation.csv", ["K", "error"], report.as_rows()))
        outputs.append(
            write_json(
                out / "truncation.json",
                {
                    "block_diagonal_error": report.block_diagonal_error,
                    "fitted_ratio": report.fitted_ratio,
                    "reference_ratio": report.reference_ratio,
                    "monotone": report.monotone,
                    "roundoff_floor": report.roundoff_floor,
                },
            )
        )
    return outputs


def run_sweep(spec: ExperimentSpec, scene: ResonatorScene) -> List[Path]:
    _require_defect(scene, spec.subcommand)
    radii = spec.option("radii", list(DEFAULT_SWEEP_RADII))
    if len(radii) == 0:
        raise ValueError("--radii needs at least one radius")
    scene = _variant(spec, scene)
    out = spec.out_dir()

    sweep = shift_sweep(scene, radii, spec.discretization())
    count = len(sweep.kinds)
    header = (
        ["radius"]
        + [f"direct_{j + 1}" for j in range(count)]
        + [f"predicted_{j + 1}" for j in range(count)]
    )
    rows = [(row.radius,) + row.direct + row.predicted for row in sweep.rows]
    return [
        write_rows_csv(out / "sweep.csv", header, rows),
        write_json(
            out / "sweep_summary.json",
            {
                "reference_eigenvalues": list(sweep.reference),
                "kinds": list(sweep.kinds),
                "slopes": sweep.slopes(),
                "ep": bool(spec.option("ep", False)),
            },
        ),
    ]


def _grid(spec: str) -> Tuple[np.ndarray, np.ndarray]:
    """``"x0:x1:n,y0:y1:m"`` -> (xs, ys)."""
    parts = spec.split(",")
    if len(parts) != 2:
        raise ValueError(f"Invalid grid '{spec}' (expected x0:x1:n,y0:y1:m)")
    return parse_axis(parts[0]), parse_axis(parts[1])


def _sensing_problem(
    spec: ExperimentSpec, scene: ResonatorScene
) -> Tuple[LossFunction, np.ndarray]:
    """Loss of the chosen scene variant against the noiseless spectrum at the truth."""
    _require_defect(scene, spec.subcommand)
    scene = _variant(spec, scene)
    model = CapacitanceForwardModel(scene, spec.discretization())
    space = ParameterSpace(radius=scene.defect.sphere.radius)

    truth = spec.option("truth", list(scene.defect.sphere.center[:2]))
    truth = np.asarray(truth, dtype=float)
    if truth.shape != (space.dimension,):
        raise ValueError(f"--truth needs {space.dimension} coordinates, got {truth.tolist()}")

    measured = model.spectrum(space.to_params(truth))
    return LossFunction(model, measured, space), truth


def run_loss_map(spec: ExperimentSpec, scene: ResonatorScene) -> List[Path]:
    xs, ys = _grid(spec.option("grid", DEFAULT_MAP_GRID))
    objective, truth = _sensing_problem(spec, scene)
    out = spec.out_dir()

    result = loss_map(objective, xs, ys)
    logs = result.log10()
    rows = [
        (x, y, result.values[i, j], logs[i, j], bool(np.isfinite(result.values[i, j])))
        for i, x in enumerate(result.xs)
        for j, y in enumerate(result.ys)
    ]
    x_min, y_min, value = result.minimum()
    return [
        write_rows_csv(out / "loss_map.csv", ["x", "y", "loss", "log10_loss", "valid"], rows),
        write_json(
            out / "loss_map.json",
            {
                "truth": truth.tolist(),
                "minimum": {"x": x_min, "y": y_min, "loss": value},
                "dynamic_range": result.dynamic_range(),
                "invalid_cells": int(np.count_nonzero(result.invalid)),
                "model": objective.model.get_model_name(),
                "ep": bool(spec.option("ep", False)),
            },
        ),
    ]


def run_sense(spec: ExperimentSpec, scene: ResonatorScene) -> List[Path]:
    levels = list(spec.option("noise", list(DEFAULT_NOISE_LEVELS)))
    xs, ys = _grid(spec.option("grid", DEFAULT_START_GRID))
    starts = [(x, y) for x in xs for y in ys]
    descent = DescentConfig(
        step=float(spec.option("step", Config.DESCENT_STEP)),
        iterations=int(spec.option("iterations", Config.DESCENT_ITERATIONS)),
    )
    objective, truth = _sensing_problem(spec, scene)
    out = spec.out_dir()

    label = "ep" if spec.option("ep", False) else "simple"
    report = monte_carlo(
        objective,
        truth,
        starts,
        levels,
        config=descent,
        draws=int(spec.option("draws", Config.NOISE_DRAWS)),
        seed=spec.seed,
        workers=spec.option("workers"),
        label=label,
    )

    rows = []
    for draw in report.draws:
        final = draw.final_point or (float("nan"),) * len(truth)
        rows.append(
            (draw.level, draw.draw)
            + tuple(draw.start)
            + tuple(final)
            + (draw.final_loss, draw.error, draw.status, draw.message)
        )
    header = (
        ["noise", "draw", "start_x", "start_y", "final_x", "final_y"]
        + ["final_loss", "error", "status", "message"]
    )
    summary = [
        {
            "noise": row.level,
            "draws": row.draws,
            "failures": row.failures,
            "median_error": row.median,
            "quantiles": {str(q): v for q, v in row.quantiles.items()},
        }
        for row in report.summary()
    ]
    return [
        write_rows_csv(out / "draws.csv", header, rows),
        write_json(
            out / "summary.json",
            {"label": label, "truth": truth.tolist(), "seed": report.seed, "levels": summary},
        ),
    ]


RUNNERS: Dict[str, Callable[[ExperimentSpec, ResonatorScene], List[Path]]] = {
    "capmat": run_capmat,
    "spectrum": run_spectrum,
    "expand": run_expand,
    "sweep": run_sweep,
    "loss-map": run_loss_map,
    "sense": run_sense,
}


def run_experiment(spec: ExperimentSpec, scene: Optional[ResonatorScene] = None) -> List[Path]:
    """
    Run ``spec.subcommand`` and write its manifest.

    Args:
        spec: Parsed CLI inputs
        scene: Scene to use instead of reading ``spec.scene`` (manifest reruns)

    Returns:
        Paths of every file written, manifest last
    """
    runner = RUNNERS.get(spec.subcommand)
    if runner is None:
        raise ValueError(f"Unknown subcommand '{spec.subcommand}' (use {sorted(RUNNERS)})")
    with Config.overridden(spec.settings):
        if scene is None:
            scene = resolve_scene(spec)
        outputs = runner(spec, scene)
        outputs.append(write_manifest(spec, scene, outputs))
    logger.info(f"{spec.subcommand}: wrote {len(outputs)} file(s) to {spec.out}")
    return outputs
