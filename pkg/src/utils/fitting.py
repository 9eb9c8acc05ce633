"""Rate fitting shared by reports, sweeps and tests."""

from typing import Sequence

import numpy as np


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Least-squares slope of log|y| against log x.

    Args:
        x: Positive abscissae (radii, distances)
        y: Nonzero values

    Returns:
        Fitted exponent p in y ≈ c·x^p
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y))
    if x.size < 2 or x.size != y.size:
        raise ValueError(f"Need at least two matching points, got {x.size} and {y.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("loglog_slope needs strictly positive data")

    design = np.column_stack((np.log(x), np.ones_like(x)))
    coefficients, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    return float(coefficients[0])


def geometric_ratio(errors: Sequence[float]) -> float:
    """Fitted ratio q in errors[k] ≈ c·q^k (least squares on the logarithms)."""
    errors = np.abs(np.asarray(errors, dtype=float))
    if errors.size < 2:
        raise ValueError("geometric_ratio needs at least two errors")
    if np.any(errors <= 0):
        raise ValueError("geometric_ratio needs strictly positive errors")

    steps = np.arange(errors.size, dtype=float)
    design = np.column_stack((steps, np.ones_like(steps)))
    coefficients, *_ = np.linalg.lstsq(design, np.log(errors), rcond=None)
    return float(np.exp(coefficients[0]))
