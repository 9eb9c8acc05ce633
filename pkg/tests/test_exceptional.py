"""Tests for gain/loss tuning to exceptional points and shifts near them."""

import numpy as np
import pytest

from src.bie import DiscretizationConfig
from src.capacitance import capacitance_matrix, weight_matrix
from src.errors import ExceptionalPointNotFoundError
from src.spectral import (
    GainLossParameterization,
    antisymmetric_profile,
    bracket_exceptional_point,
    eigenpairs,
    find_exceptional_point,
    jordan_chain,
    relative_gap,
    shift_sweep,
)

# diag(1 + iτ, 1 - iτ)·TOY has eigenvalues 2 ± sqrt(1 - 3τ²)
TOY = np.array([[2.0, -1.0], [-1.0, 2.0]])
TOY_TAU = 1.0 / np.sqrt(3.0)


@pytest.fixture
def toy_parameterization():
    return GainLossParameterization(np.ones(2))


def test_antisymmetric_profile():
    np.testing.assert_allclose(antisymmetric_profile(3), [1.0, 0.0, -1.0])
    np.testing.assert_allclose(antisymmetric_profile(2), [1.0, -1.0])
    np.testing.assert_allclose(antisymmetric_profile(1), [0.0])


def test_default_profiles(chain):
    parameterization = GainLossParameterization.for_scene(chain)
    np.testing.assert_allclose(parameterization.magnitude_profile, [0.0, 1.0, 0.0])
    np.testing.assert_allclose(parameterization.base_weights, weight_matrix(chain).values)
    np.testing.assert_allclose(
        parameterization.factors((0.5, 0.2)), [1 + 0.5j, 1.2, 1 - 0.5j]
    )


def test_profile_shape_mismatch():
    with pytest.raises(ValueError):
        GainLossParameterization(np.ones(3), gain_profile=np.ones(2))


def test_tuned_scene_matches_tuned_weights(chain):
    parameterization = GainLossParameterization.for_scene(chain)
    parameters = (0.3, -0.1)
    tuned = parameterization.apply_to_scene(chain, parameters)
    np.testing.assert_allclose(
        weight_matrix(tuned).values, parameterization.weights(parameters).values, rtol=1e-14
    )


def test_relative_gap_of_toy(toy_parameterization):
    gap, pair, eigenvalues = relative_gap(TOY, toy_parameterization.weights((0.0, 0.0)))
    assert gap == pytest.approx(2.0 / 3.0)
    assert pair == (0, 1)
    np.testing.assert_allclose(eigenvalues, [1.0, 3.0])


def test_bracket_finds_toy_neighbourhood(toy_parameterization):
    tau, gap = bracket_exceptional_point(TOY, toy_parameterization)
    assert abs(tau - TOY_TAU) <= 0.01
    assert gap < 0.2


def test_toy_exceptional_point(toy_parameterization):
    result = find_exceptional_point(TOY, toy_parameterization)
    assert result.parameters[0] == pytest.approx(TOY_TAU, abs=1e-6)
    assert result.gap <= 1e-6
    assert result.condition <= 1e-4
    assert result.eigenvalue == pytest.approx(2.0, abs=1e-5)
    assert result.history[0] >= result.history[-1]


def test_toy_exceptional_point_is_defective(toy_parameterization):
    result = find_exceptional_point(TOY, toy_parameterization, initial_guess=(0.5, 0.0))
    matrix = result.weights.values[:, None] * TOY
    chain = jordan_chain(matrix, result.eigenvalue, 2, tolerance=1e-5)
    assert chain.normalization_error() < 1e-8


def test_conditions_shrink_towards_exceptional_point(toy_parameterization):
    conditions = []
    for offset in (1e-2, 1e-4, 1e-6):
        weights = toy_parameterization.weights((TOY_TAU * (1.0 - offset), 0.0))
        conditions.append(min(p.condition for p in eigenpairs(weights.values[:, None] * TOY)))
    assert conditions[0] > conditions[1] > conditions[2]


def test_real_weights_never_coalesce():
    parameterization = GainLossParameterization(
        np.ones(2), gain_profile=np.zeros(2), magnitude_profile=np.zeros(2)
    )
    with pytest.raises(ExceptionalPointNotFoundError) as info:
        find_exceptional_point(TOY, parameterization, initial_guess=(0.1, 0.0))
    assert info.value.best_gap == pytest.approx(2.0 / 3.0)
    assert len(info.value.best_parameters) == 2


@pytest.mark.slow
def test_chain_exceptional_point_and_shift_rates(chain):
    config = DiscretizationConfig(max_degree=2)
    parameterization = GainLossParameterization.for_scene(chain)
    result = find_exceptional_point(capacitance_matrix(chain, config), parameterization)
    assert result.gap <= 1e-6
    assert result.condition <= 1e-4

    tuned = parameterization.apply_to_scene(chain, result.parameters)
    scene = tuned.with_defect((3.0, 0.0, 0.0), 1e-4)
    sweep = shift_sweep(scene, [1e-4, 3e-4, 1e-3], config, condition_floor=1e-3)
    assert sorted(sweep.kinds) == ["ep", "ep", "simple"]

    slopes = sweep.slopes()
    for j, kind in enumerate(sweep.kinds):
        expected = 0.5 if kind == "ep" else 1.0
        assert slopes["direct"][j] == pytest.approx(expected, abs=0.15)
        assert slopes["predicted"][j] == pytest.approx(expected, abs=0.15)

    smallest = sweep.rows[0]
    ep_shift = max(smallest.direct[j] for j, kind in enumerate(sweep.kinds) if kind == "ep")
    simple_shift = max(smallest.direct[j] for j, kind in enumerate(sweep.kinds) if kind == "simple")
    assert ep_shift >= 10.0 * simple_shift
