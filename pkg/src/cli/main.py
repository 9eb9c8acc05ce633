"""Argument parsing and exit-status mapping for the experiment CLI."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from ..config import Config
from ..errors import ResonatorError
from .experiments import ExperimentSpec, load_manifest, run_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def _floats(text: str) -> List[float]:
    """Comma-separated floats; an empty string gives an empty list."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", type=Path, help="Scene file (JSON); default three-sphere chain")
    common.add_argument("--out", type=Path, default=Path("results"), help="Output directory")
    common.add_argument("--degree", type=int, default=Config.MAX_DEGREE, help="Harmonic degree L")
    common.add_argument("--seed", type=int, default=Config.DEFAULT_SEED, help="Random seed")

    parser = argparse.ArgumentParser(
        prog="resonator-sensing",
        description="Capacitance models, multiple-scattering expansions and defect sensing",
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    capmat = commands.add_parser("capmat", parents=[common], help="Capacitance matrices C and C̃")
    capmat.add_argument("--dump-operator", type=Path, help="Write the Galerkin matrix (.npy/.csv)")

    spectrum = commands.add_parser("spectrum", parents=[common], help="Eigenvalues and resonances")
    spectrum.add_argument("--find-ep", action="store_true", help="Tune gain/loss to an EP")

    expand = commands.add_parser("expand", parents=[common], help="Multiple-scattering expansion")
    expand.add_argument("--order", type=int, default=1, help="Highest expansion order")
    expand.add_argument("--report-truncation", type=int, default=0, metavar="K",
                        help="Neumann truncation errors for K = 1..K")

    sweep = commands.add_parser("sweep", parents=[common], help="Resonance shift vs defect radius")
    sweep.add_argument("--radii", type=_floats, help="Comma-separated defect radii")
    sweep.add_argument("--ep", action="store_true", help="Use the EP-tuned scene")

    landscape = commands.add_parser("loss-map", parents=[common], help="Loss on a grid of centers")
    landscape.add_argument("--grid", help="x0:x1:n,y0:y1:m")
    landscape.add_argument("--truth", type=_floats, help="True defect coordinates x,y")
    landscape.add_argument("--ep", action="store_true", help="Use the EP-tuned scene")

    sense = commands.add_parser("sense", parents=[common], help="Noisy localization Monte Carlo")
    sense.add_argument("--noise", type=_floats, help="Comma-separated noise levels ε")
    sense.add_argument("--draws", type=int, default=Config.NOISE_DRAWS, help="Draws per level")
    sense.add_argument("--grid", help="Start points x0:x1:n,y0:y1:m")
    sense.add_argument("--truth", type=_floats, help="True defect coordinates x,y")
    sense.add_argument("--iterations", type=int, default=Config.DESCENT_ITERATIONS)
    sense.add_argument("--step", type=float, default=Config.DESCENT_STEP, help="Step factor λ")
    sense.add_argument("--workers", type=int, help="Threads for the draws")
    sense.add_argument("--ep", action="store_true", help="Use the EP-tuned scene")

    rerun = commands.add_parser("rerun", help="Repeat a run from its manifest")
    rerun.add_argument("manifest", type=Path)
    rerun.add_argument("--out", type=Path, help="Output directory (default: the recorded one)")

    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    common = {"subcommand", "scene", "out", "degree", "seed"}
    options = {k: v for k, v in vars(args).items() if k not in common}
    return ExperimentSpec(
        subcommand=args.subcommand,
        scene=args.scene,
        out=args.out,
        degree=args.degree,
        seed=args.seed,
        options=options,
    )


def _run(args: argparse.Namespace) -> List[Path]:
    if args.subcommand == "rerun":
        spec, scene = load_manifest(args.manifest)
        if args.out is not None:
            spec = spec.model_copy(update={"out": args.out})
        return run_experiment(spec, scene)
    return run_experiment(spec_from_args(args))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 on numerical failure, 2 on usage, scene or IO errors
    """
    args = build_parser().parse_args(argv)
    try:
        outputs = _run(args)
    except np.linalg.LinAlgError as e:
        # LinAlgError subclasses ValueError
        logger.error(f"{args.subcommand} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResonatorError as e:
        logger.error(f"{args.subcommand} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    for path in outputs:
        print(path)
    return EXIT_OK
