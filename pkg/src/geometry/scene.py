"""Sphere-based resonator scenes: bodies, materials, separation and regime checks."""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from ..errors import MissingDefectError, OverlapError, SceneError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sphere:
    """Ball with a center in R^3 and a radius."""

    center: Tuple[float, float, float]
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in self.center)
        if len(center) != 3:
            raise SceneError(f"Sphere center must have 3 coordinates, got {len(center)}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def position(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    @property
    def area(self) -> float:
        """Surface measure |∂B| = 4πR²."""
        return 4.0 * math.pi * self.radius**2

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    def gap_to(self, other: "Sphere") -> float:
        """Distance between the two closed balls (negative when they intersect)."""
        return float(np.linalg.norm(self.position - other.position)) - self.radius - other.radius

    def moved(self, center: Sequence[float]) -> "Sphere":
        return replace(self, center=tuple(center))


@dataclass(frozen=True)
class Material:
    """
    High-contrast material of one body.

    ``delta`` and ``wave_speed`` may be complex; imaginary parts model gain and loss.
    """

    delta: complex = 1.0
    wave_speed: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "delta", complex(self.delta))
        object.__setattr__(self, "wave_speed", complex(self.wave_speed))

    def weight(self, sphere: Sphere) -> complex:
        """Capacitance weight δ v² / |D| for this material filling ``sphere``."""
        if sphere.volume <= 0:
            raise SceneError(f"Zero volume body (radius {sphere.radius})")
        return self.delta * self.wave_speed**2 / sphere.volume


@dataclass(frozen=True)
class Body:
    """A sphere together with its material."""

    sphere: Sphere
    material: Material = field(default_factory=Material)


@dataclass(frozen=True)
class ResonatorScene:
    """
    Ordered chain of N resonators plus an optional defect particle.

    The resonator order fixes the capacitance index convention; the defect, when
    present, always carries index N (0-based), i.e. body N+1 counting from one.
    """

    resonators: Tuple[Body, ...]
    defect: Optional[Body] = None

    def __post_init__(self):
        object.__setattr__(self, "resonators", tuple(self.resonators))

    @property
    def size(self) -> int:
        """Number of resonators N (defect excluded)."""
        return len(self.resonators)

    @property
    def has_defect(self) -> bool:
        return self.defect is not None

    @property
    def bodies(self) -> Tuple[Body, ...]:
        """All bodies, resonators first and the defect last."""
        if self.defect is None:
            return self.resonators
        return self.resonators + (self.defect,)

    @property
    def spheres(self) -> List[Sphere]:
        return [body.sphere for body in self.bodies]

    def with_defect(
        self,
        center: Sequence[float],
        radius: float,
        material: Optional[Material] = None,
    ) -> "ResonatorScene":
        """Copy of the scene with the defect placed at ``center`` with ``radius``."""
        if material is None:
            material = self.defect.material if self.defect is not None else Material()
        return replace(self, defect=Body(Sphere(tuple(center), radius), material))

    def without_defect(self) -> "ResonatorScene":
        return replace(self, defect=None)

    def with_materials(self, materials: Sequence[Material]) -> "ResonatorScene":
        """Copy with resonator materials replaced (defect untouched)."""
        if len(materials) != self.size:
            raise SceneError(f"Expected {self.size} materials, got {len(materials)}")
        resonators = tuple(Body(b.sphere, m) for b, m in zip(self.resonators, materials))
        return replace(self, resonators=resonators)

    def scaled(self, factor: float) -> "ResonatorScene":
        """Dilate every length of the scene by ``factor`` about the origin."""
        return self.transformed(np.eye(3) * factor, np.zeros(3), radius_factor=factor)

    def transformed(
        self,
        rotation: np.ndarray,
        translation: Sequence[float],
        radius_factor: float = 1.0,
    ) -> "ResonatorScene":
        """Apply x -> rotation @ x + translation to every center."""
        rotation = np.asarray(rotation, dtype=float)
        translation = np.asarray(translation, dtype=float)

        def move(body: Body) -> Body:
            center = rotation @ body.sphere.position + translation
            return Body(Sphere(tuple(center), body.sphere.radius * radius_factor), body.material)

        defect = None if self.defect is None else move(self.defect)
        return ResonatorScene(tuple(move(b) for b in self.resonators), defect)


@dataclass(frozen=True)
class RegimeReport:
    """Smallness ratio |∂Ω|^{1/2}/d of the defect."""

    distance_d: float
    ratio: float
    threshold: float

    @property
    def in_regime(self) -> bool:
        return self.ratio < self.threshold


@dataclass(frozen=True)
class Violation:
    """One failed scene invariant."""

    kind: str  # "radius", "overlap", "separation", "size"
    subject: str
    message: str


def uniform_chain(
    radius: float = 1.0 / 3.0,
    count: int = 3,
    spacing: float = 1.0,
    materials: Optional[Sequence[Material]] = None,
) -> ResonatorScene:
    """Chain of equal spheres with centers (j·spacing, 0, 0), j = 0..count-1."""
    if materials is None:
        materials = [Material() for _ in range(count)]
    resonators = tuple(
        Body(Sphere((j * spacing, 0.0, 0.0), radius), materials[j]) for j in range(count)
    )
    return ResonatorScene(resonators)


def _label(scene: ResonatorScene, index: int) -> str:
    return "defect" if index == scene.size else f"resonator {index + 1}"


def separation_distance(scene: ResonatorScene) -> float:
    """
    Distance d between the resonators and the defect.

    Args:
        scene: Scene with a defect

    Returns:
        min_i (|c_Ω - c_i| - R_Ω - R_i), strictly positive

    Raises:
        MissingDefectError: If the scene has no defect
        OverlapError: If the defect touches or intersects a resonator
    """
    if scene.defect is None:
        raise MissingDefectError("Separation distance requires a defect")
    if scene.size == 0:
        raise SceneError("Scene has no resonators")

    gaps = [scene.defect.sphere.gap_to(body.sphere) for body in scene.resonators]
    distance = min(gaps)
    if distance <= 0:
        offender = int(np.argmin(gaps))
        raise OverlapError(
            f"Overlapping bodies: defect and resonator {offender + 1} (gap {distance:.3e})"
        )
    return distance


def regime_ratio(scene: ResonatorScene, threshold: Optional[float] = None) -> RegimeReport:
    """
    Compute |∂Ω|^{1/2}/d for the defect of ``scene``.

    Args:
        scene: Scene with a defect
        threshold: Ratio below which the scene counts as in-regime (default from Config)

    Returns:
        RegimeReport with distance, ratio and threshold
    """
    if threshold is None:
        threshold = Config.REGIME_THRESHOLD
    distance = separation_distance(scene)
    ratio = math.sqrt(scene.defect.sphere.area) / distance
    return RegimeReport(distance_d=distance, ratio=ratio, threshold=threshold)


def validate_scene(
    scene: ResonatorScene,
    min_separation: Optional[float] = None,
) -> List[Violation]:
    """
    Check every scene invariant and collect the violations.

    Args:
        scene: Scene to check
        min_separation: Lower bound c_d on the defect distance (default from Config)

    Returns:
        List of violations; empty when the scene is valid
    """
    if min_separation is None:
        min_separation = Config.MIN_SEPARATION

    violations: List[Violation] = []
    bodies = scene.bodies

    if scene.size == 0:
        violations.append(Violation("size", "scene", "Scene has no resonators"))

    for index, body in enumerate(bodies):
        radius = body.sphere.radius
        if not math.isfinite(radius) or radius <= 0:
            violations.append(
                Violation("radius", _label(scene, index), f"Radius must be > 0, got {radius}")
            )
        if not np.all(np.isfinite(body.sphere.position)):
            violations.append(
                Violation("center", _label(scene, index), "Center has non-finite coordinates")
            )
        if body.material.delta.real <= 0:
            violations.append(
                Violation(
                    "delta",
                    _label(scene, index),
                    f"Real part of delta must be > 0, got {body.material.delta}",
                )
            )

    for i in range(len(bodies)):
        for j in range(i + 1, len(bodies)):
            gap = bodies[i].sphere.gap_to(bodies[j].sphere)
            pair = f"{_label(scene, i)} / {_label(scene, j)}"
            if gap <= 0:
                violations.append(Violation("overlap", pair, f"Bodies overlap (gap {gap:.3e})"))
            elif j == scene.size and gap < min_separation:
                violations.append(
                    Violation(
                        "separation",
                        pair,
                        f"Defect distance {gap:.3e} below c_d = {min_separation:.1e}",
                    )
                )

    if violations:
        logger.debug(f"Scene validation found {len(violations)} violation(s)")
    return violations


def require_valid(scene: ResonatorScene, min_separation: Optional[float] = None) -> None:
    """Raise on the first invariant violation of ``scene``."""
    violations = validate_scene(scene, min_separation)
    if not violations:
        return
    first = violations[0]
    message = "; ".join(f"{v.kind}: {v.subject}: {v.message}" for v in violations)
    if first.kind == "overlap":
        raise OverlapError(message)
    raise SceneError(message)
