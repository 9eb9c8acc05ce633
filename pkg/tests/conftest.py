"""Shared fixtures: small scenes, discretizations and analytic forward models."""

import numpy as np
import pytest

from src.bie import DiscretizationConfig
from src.errors import InvalidDefectError
from src.geometry import Material, uniform_chain
from src.sensing import DefectParams, ForwardModel, ParameterSpace


@pytest.fixture
def config():
    return DiscretizationConfig(max_degree=4)


@pytest.fixture
def coarse_config():
    return DiscretizationConfig(max_degree=2)


@pytest.fixture
def chain():
    return uniform_chain()


@pytest.fixture
def defect_scene(chain):
    return chain.with_defect((3.0, 0.0, 0.0), 1e-2)


@pytest.fixture
def tiny_defect_scene(chain):
    return chain.with_defect((3.0, 0.0, 0.0), 1e-4, Material())


class LinearModel(ForwardModel):
    """ω = base + J·(p - anchor), with J = sensitivity·I unless ``jacobian`` is given."""

    def __init__(self, sensitivity=0.1, base=(1.0, 2.0), anchor=(3.0, 0.5), jacobian=None):
        self.sensitivity = sensitivity
        self.base = np.asarray(base, dtype=complex)
        self.anchor = np.asarray(anchor, dtype=float)
        self.jacobian = (
            sensitivity * np.eye(2) if jacobian is None else np.asarray(jacobian, dtype=float)
        )

    @property
    def resonator_count(self):
        return len(self.base)

    def resonances(self, params: DefectParams):
        offset = np.asarray(params.center[:2]) - self.anchor
        return self.base + self.jacobian @ offset

    def get_model_name(self):
        return f"linear-{self.sensitivity:g}"


class WalledModel(LinearModel):
    """Linear model that rejects defects with x above ``wall``."""

    def __init__(self, wall=3.6, **kwargs):
        super().__init__(**kwargs)
        self.wall = wall

    def resonances(self, params: DefectParams):
        if params.center[0] > self.wall:
            raise InvalidDefectError(f"x = {params.center[0]} beyond the wall")
        return super().resonances(params)


@pytest.fixture
def linear_model():
    return LinearModel()


@pytest.fixture
def plane_space():
    return ParameterSpace(radius=1e-4)
