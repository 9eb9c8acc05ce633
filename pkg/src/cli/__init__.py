"""Experiment CLI: capmat, spectrum, expand, sweep, loss-map and sense."""

from .experiments import ExperimentSpec, default_scene, ep_variant, load_manifest, run_experiment
from .main import build_parser, main
from .output import read_matrix_csv, write_json, write_matrix_csv, write_rows_csv

__all__ = [
    "ExperimentSpec",
    "default_scene",
    "ep_variant",
    "load_manifest",
    "run_experiment",
    "build_parser",
    "main",
    "read_matrix_csv",
    "write_json",
    "write_matrix_csv",
    "write_rows_csv",
]
