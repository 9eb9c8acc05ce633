"""Defect localization from measured resonances."""

from .descent import DescentConfig, DescentTrace, gradient_fd, steepest_descent
from .landscape import LossMap, loss_map, parse_axis
from .loss import LossFunction, NoiseModel, loss, noisy_measurements, spectral_mismatch
from .models import (
    CapacitanceForwardModel,
    DefectParams,
    ExpansionForwardModel,
    ForwardModel,
    MeasuredSpectrum,
    ParameterSpace,
    cluster_groups,
    forward_resonances,
)
from .monte_carlo import DrawResult, LevelSummary, MonteCarloReport, monte_carlo

__all__ = [
    "DescentConfig",
    "DescentTrace",
    "gradient_fd",
    "steepest_descent",
    "LossMap",
    "loss_map",
    "parse_axis",
    "LossFunction",
    "NoiseModel",
    "loss",
    "noisy_measurements",
    "spectral_mismatch",
    "CapacitanceForwardModel",
    "DefectParams",
    "ExpansionForwardModel",
    "ForwardModel",
    "MeasuredSpectrum",
    "ParameterSpace",
    "cluster_groups",
    "forward_resonances",
    "DrawResult",
    "LevelSummary",
    "MonteCarloReport",
    "monte_carlo",
]
