"""Resonator scene geometry."""

from .scene import (
    Body,
    Material,
    RegimeReport,
    ResonatorScene,
    Sphere,
    Violation,
    uniform_chain,
    regime_ratio,
    require_valid,
    separation_distance,
    validate_scene,
)
from .scene_file import SceneFile, load_scene, save_scene

__all__ = [
    "Body",
    "Material",
    "RegimeReport",
    "ResonatorScene",
    "Sphere",
    "Violation",
    "uniform_chain",
    "regime_ratio",
    "require_valid",
    "separation_distance",
    "validate_scene",
    "SceneFile",
    "load_scene",
    "save_scene",
]
