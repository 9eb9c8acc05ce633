"""JSON scene files shared by all CLI subcommands."""

import json
import logging
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import SceneFileError
from .scene import Body, Material, ResonatorScene, Sphere

logger = logging.getLogger(__name__)


class ComplexValue(BaseModel):
    """Complex number written as {"re": ..., "im": ...}."""

    model_config = ConfigDict(extra="forbid")

    re: float
    im: float = 0.0

    @classmethod
    def of(cls, value: complex) -> "ComplexValue":
        value = complex(value)
        return cls(re=value.real, im=value.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class BodyEntry(BaseModel):
    """One sphere with its material parameters."""

    model_config = ConfigDict(extra="forbid")

    center: List[float]
    radius: float
    delta: ComplexValue = Field(default_factory=lambda: ComplexValue(re=1.0))
    speed: ComplexValue = Field(default_factory=lambda: ComplexValue(re=1.0))

    @field_validator("center")
    @classmethod
    def _three_coordinates(cls, value: List[float]) -> List[float]:
        if len(value) != 3:
            raise ValueError(f"center must have 3 coordinates, got {len(value)}")
        return value

    def to_body(self) -> Body:
        return Body(
            Sphere(tuple(self.center), self.radius),
            Material(self.delta.to_complex(), self.speed.to_complex()),
        )

    @classmethod
    def from_body(cls, body: Body) -> "BodyEntry":
        return cls(
            center=list(body.sphere.center),
            radius=body.sphere.radius,
            delta=ComplexValue.of(body.material.delta),
            speed=ComplexValue.of(body.material.wave_speed),
        )


class SceneFile(BaseModel):
    """Top-level scene document."""

    model_config = ConfigDict(extra="forbid")

    resonators: List[BodyEntry]
    defect: Optional[BodyEntry] = None

    def to_scene(self) -> ResonatorScene:
        defect = None if self.defect is None else self.defect.to_body()
        return ResonatorScene(tuple(entry.to_body() for entry in self.resonators), defect)

    @classmethod
    def from_scene(cls, scene: ResonatorScene) -> "SceneFile":
        return cls(
            resonators=[BodyEntry.from_body(b) for b in scene.resonators],
            defect=None if scene.defect is None else BodyEntry.from_body(scene.defect),
        )


def load_scene(path: Union[str, Path]) -> ResonatorScene:
    """
    Read and validate a scene file.

    Args:
        path: JSON scene file

    Returns:
        The parsed ResonatorScene

    Raises:
        SceneFileError: If the file is missing, unreadable or malformed
    """
    path = Path(path)
    if not path.exists():
        raise SceneFileError(f"Scene file not found: {path}")

    try:
        document = SceneFile.model_validate_json(path.read_text(encoding="utf-8"))
    except (ValidationError, OSError) as e:
        raise SceneFileError(f"Invalid scene file {path}: {e}") from e

    scene = document.to_scene()
    logger.info(
        f"Loaded scene {path.name}: {scene.size} resonator(s), "
        f"defect {'present' if scene.has_defect else 'absent'}"
    )
    return scene


def save_scene(scene: ResonatorScene, path: Union[str, Path]) -> Path:
    """Write ``scene`` as a JSON scene file."""
    path = Path(path)
    document = SceneFile.from_scene(scene)
    path.write_text(json.dumps(document.model_dump(), indent=2), encoding="utf-8")
    return path
