"""Configuration settings for resonator-sensing."""

import os
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Mapping


class Config:
    """Library and experiment configuration."""

    # Discretization
    MAX_DEGREE: int = int(os.getenv("RESONATOR_MAX_DEGREE", "4"))
    ORACLE_DEGREE: int = int(os.getenv("RESONATOR_ORACLE_DEGREE", "8"))
    # 0 selects the default order 2(L+1)
    QUADRATURE_ORDER: int = int(os.getenv("RESONATOR_QUADRATURE_ORDER", "0"))

    # Geometry
    MIN_SEPARATION: float = float(os.getenv("MIN_SEPARATION", "1e-3"))
    REGIME_THRESHOLD: float = float(os.getenv("REGIME_THRESHOLD", "0.5"))
    MIN_DEFECT_RADIUS: float = float(os.getenv("MIN_DEFECT_RADIUS", "1e-8"))

    # Linear algebra
    CONDITION_LIMIT: float = float(os.getenv("CONDITION_LIMIT", "1e12"))
    SPECTRAL_RADIUS_ITERATIONS: int = int(os.getenv("SPECTRAL_RADIUS_ITERATIONS", "50"))
    SPECTRAL_RADIUS_TOLERANCE: float = float(os.getenv("SPECTRAL_RADIUS_TOLERANCE", "1e-6"))

    # Spectral analysis
    EIGEN_CONDITION_FLOOR: float = float(os.getenv("EIGEN_CONDITION_FLOOR", "1e-6"))
    DEFECTIVE_TOLERANCE: float = float(os.getenv("DEFECTIVE_TOLERANCE", "1e-8"))
    # Eigenvalues at an order-2 EP are only computable to about sqrt(machine eps)
    EP_GAP_TOLERANCE: float = float(os.getenv("EP_GAP_TOLERANCE", "1e-6"))
    EP_CONDITION_CEILING: float = float(os.getenv("EP_CONDITION_CEILING", "1e-4"))

    # Sensing
    DESCENT_STEP: float = float(os.getenv("DESCENT_STEP", "0.9"))
    DESCENT_ITERATIONS: int = int(os.getenv("DESCENT_ITERATIONS", "20"))
    FD_STEP: float = float(os.getenv("FD_STEP", "1e-3"))
    NOISE_DRAWS: int = int(os.getenv("NOISE_DRAWS", "100"))
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Numeric settings a run depends on; recorded in manifests
    SETTINGS = (
        "MAX_DEGREE",
        "ORACLE_DEGREE",
        "QUADRATURE_ORDER",
        "MIN_SEPARATION",
        "REGIME_THRESHOLD",
        "MIN_DEFECT_RADIUS",
        "CONDITION_LIMIT",
        "SPECTRAL_RADIUS_ITERATIONS",
        "SPECTRAL_RADIUS_TOLERANCE",
        "EIGEN_CONDITION_FLOOR",
        "DEFECTIVE_TOLERANCE",
        "EP_GAP_TOLERANCE",
        "EP_CONDITION_CEILING",
        "DESCENT_STEP",
        "DESCENT_ITERATIONS",
        "FD_STEP",
        "NOISE_DRAWS",
        "DEFAULT_SEED",
    )

    @classmethod
    def settings(cls) -> Dict[str, Any]:
        """Current values of every numeric setting."""
        return {name: getattr(cls, name) for name in cls.SETTINGS}

    @classmethod
    @contextmanager
    def overridden(cls, settings: Mapping[str, Any]) -> Iterator[None]:
        """
        Apply recorded settings for the duration of the block, then restore the previous ones.

        Raises:
            ValueError: On an unknown name, a value of the wrong type or an invalid combination
        """
        unknown = sorted(set(settings) - set(cls.SETTINGS))
        if unknown:
            raise ValueError(f"Unknown settings: {', '.join(unknown)}")
        saved = cls.settings()
        try:
            for name, value in settings.items():
                kind = type(saved[name])
                if kind is int and float(value) != int(value):
                    raise ValueError(f"{name} must be an integer, got {value}")
                setattr(cls, name, kind(value))
            cls.validate()
            yield
        finally:
            for name, value in saved.items():
                setattr(cls, name, value)

    @classmethod
    def quadrature_order_for(cls, max_degree: int) -> int:
        """Quadrature points per angular direction for a given truncation degree."""
        if cls.QUADRATURE_ORDER > 0:
            return max(cls.QUADRATURE_ORDER, max_degree + 1)
        return 2 * (max_degree + 1)

    @classmethod
    def validate(cls) -> None:
        """Validate configuration values."""
        problems = []

        if cls.MAX_DEGREE < 0:
            problems.append("RESONATOR_MAX_DEGREE (must be >= 0)")
        if cls.ORACLE_DEGREE < cls.MAX_DEGREE:
            problems.append("RESONATOR_ORACLE_DEGREE (must be >= RESONATOR_MAX_DEGREE)")
        if cls.QUADRATURE_ORDER < 0:
            problems.append("RESONATOR_QUADRATURE_ORDER (must be >= 0)")
        if cls.MIN_SEPARATION <= 0:
            problems.append("MIN_SEPARATION (must be > 0)")
        if cls.REGIME_THRESHOLD <= 0:
            problems.append("REGIME_THRESHOLD (must be > 0)")
        if cls.MIN_DEFECT_RADIUS <= 0:
            problems.append("MIN_DEFECT_RADIUS (must be > 0)")
        if not 0 < cls.DESCENT_STEP <= 1:
            problems.append("DESCENT_STEP (must lie in (0, 1])")
        if cls.DESCENT_ITERATIONS < 0:
            problems.append("DESCENT_ITERATIONS (must be >= 0)")
        if cls.FD_STEP <= 0:
            problems.append("FD_STEP (must be > 0)")
        if cls.NOISE_DRAWS < 1:
            problems.append("NOISE_DRAWS (must be >= 1)")

        if problems:
            raise ValueError(
                "Invalid configuration:\n" + "\n".join(f"- {p}" for p in problems)
            )
