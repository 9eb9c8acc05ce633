"""Exception hierarchy for resonator-sensing."""

from typing import Optional, Sequence


class ResonatorError(Exception):
    """Base class for all library errors."""


# Input problems


class SceneError(ResonatorError, ValueError):
    """Invalid resonator scene."""


class OverlapError(SceneError):
    """Two bodies of a scene intersect or touch."""


class MissingDefectError(SceneError):
    """Operation requires a defect particle but the scene has none."""


class DefectTooSmallError(SceneError):
    """Defect radius below the supported minimum."""


class InvalidDefectError(SceneError):
    """Defect parameters outside the admissible set (inside a resonator, bad radius)."""


class DiscretizationError(ResonatorError, ValueError):
    """Invalid discretization settings or body index."""


class SceneFileError(ResonatorError, ValueError):
    """Scene file cannot be read or does not validate."""


# Numerical failures


class IllConditionedError(ResonatorError, ArithmeticError):
    """Galerkin matrix too ill-conditioned to solve reliably."""


class DivergenceError(ResonatorError, ArithmeticError):
    """Multiple-scattering series would not converge (spectral radius >= 1)."""


class IllConditionedEigenvalueError(ResonatorError, ArithmeticError):
    """Eigenvalue condition |y*x| below the floor; use the exceptional-point path."""


class NotDefectiveError(ResonatorError, ArithmeticError):
    """Eigenvalue is not defective of the requested order."""


class ChainNormalizationError(ResonatorError, ArithmeticError):
    """Jordan chains cannot be normalized to Y*X = I."""


class ExceptionalPointNotFoundError(ResonatorError, ArithmeticError):
    """Exceptional-point search did not close the eigenvalue gap."""

    def __init__(self, best_gap: float, best_parameters: Optional[Sequence[float]] = None):
        self.best_gap = best_gap
        self.best_parameters = None if best_parameters is None else list(best_parameters)
        super().__init__(
            f"Exceptional point not found: best relative gap {best_gap:.3e} "
            f"at parameters {self.best_parameters}"
        )


class EigensolverError(ResonatorError, ArithmeticError):
    """Dense eigensolver did not converge."""
