"""Tests for resonances, eigenpairs and the simple and root perturbation formulas."""

import numpy as np
import pytest

from src.bie import DiscretizationConfig
from src.capacitance import (
    capacitance_matrix,
    perturbed_capacitance_direct,
    weight_matrix,
    weighted_capacitance,
)
from src.errors import IllConditionedEigenvalueError, MissingDefectError, NotDefectiveError
from src.scattering import BlockSingleLayer, first_order_correction
from src.spectral import (
    eigenpairs,
    ep_perturbation,
    jordan_chain,
    match_to_reference,
    principal_sqrt,
    resonances,
    shift_sweep,
    simple_perturbation,
)
from src.utils import loglog_slope

A = np.array([[1.0, 0.5, 0.0], [0.2, 2.0, 0.3], [0.0, 0.1, 3.0]])
E = np.array([[0.3, -0.2, 0.1], [0.4, 0.1, -0.3], [0.2, 0.5, -0.1]])


def test_resonances_are_square_roots():
    spectrum = resonances(np.diag([9.0, 1.0, 4.0]))
    np.testing.assert_allclose(spectrum.eigenvalues, [1, 4, 9])
    np.testing.assert_allclose(spectrum.resonances, [1, 2, 3])
    assert len(spectrum) == 3


def test_resonances_scale_with_root_of_weight():
    base = resonances(A).resonances
    np.testing.assert_allclose(resonances(4.0 * A).resonances, 2.0 * base, rtol=1e-12)


def test_resonances_need_square_matrix():
    with pytest.raises(ValueError):
        resonances(np.ones((2, 3)))


def test_principal_sqrt_branch():
    roots = principal_sqrt([-4.0, 1j, 4.0])
    assert np.all(roots.real >= 0)
    np.testing.assert_allclose(roots**2, [-4.0, 1j, 4.0], atol=1e-15)


def test_eigenpairs_of_symmetric_matrix():
    symmetric = (A + A.T) / 2
    for pair in eigenpairs(symmetric):
        np.testing.assert_allclose(pair.left, pair.right, atol=1e-12)
        assert pair.condition == pytest.approx(1.0)
        assert not pair.clustered
        np.testing.assert_allclose(symmetric @ pair.right, pair.eigenvalue * pair.right, atol=1e-12)


def test_eigenpairs_of_diagonal_matrix():
    pairs = eigenpairs(np.diag([3.0, 1.0, 2.0]))
    assert [p.eigenvalue for p in pairs] == [1, 2, 3]
    for j, pair in zip([1, 2, 0], pairs):
        np.testing.assert_allclose(np.abs(pair.right), np.eye(3)[j])


def test_eigenpairs_left_vectors():
    for pair in eigenpairs(A):
        np.testing.assert_allclose(
            pair.left.conj() @ A, pair.eigenvalue * pair.left.conj(), atol=1e-12
        )
        assert 0 < pair.condition <= 1


def test_eigenpairs_flag_clusters():
    pairs = eigenpairs(np.diag([1.0, 1.0 + 1e-9, 2.0]))
    assert [p.clustered for p in pairs] == [True, True, False]


def test_weighted_chain_resonances(chain, config):
    weights = weight_matrix(chain)
    spectrum = resonances(weighted_capacitance(capacitance_matrix(chain, config), weights))
    assert np.all(spectrum.eigenvalues.real > 0)
    np.testing.assert_allclose(spectrum.eigenvalues.imag, 0, atol=1e-10)


def test_zero_correction_leaves_eigenvalue():
    pair = eigenpairs(A)[1]
    result = simple_perturbation(pair, np.ones(3), np.zeros((3, 3)))
    assert result.eigenvalues[0] == pytest.approx(pair.eigenvalue)
    assert result.xi == 0
    assert result.order == 1


def test_simple_perturbation_of_diagonal_matrix():
    pair = eigenpairs(np.diag([1.0, 2.0, 3.0]))[0]
    weights = [2.0, 1.0, 1.0, 5.0]
    correction = (np.arange(16.0).reshape(4, 4) + 1.0) * 1e-3
    result = simple_perturbation(pair, weights, correction, regime=0.1)
    assert result.eigenvalues[0] == pytest.approx(1.0 + 2.0 * correction[0, 0])
    assert result.resonances[0] == pytest.approx(np.sqrt(result.eigenvalues[0]))
    assert result.remainder_estimate == pytest.approx(0.01)


def test_simple_perturbation_error_is_second_order():
    pair = eigenpairs(A)[0]
    scales = [1e-2, 1e-3, 1e-4]
    errors = []
    for scale in scales:
        exact = match_to_reference(np.linalg.eigvals(A + scale * E), [pair.eigenvalue])[0]
        predicted = simple_perturbation(pair, np.ones(3), scale * E).eigenvalues[0]
        errors.append(abs(exact - predicted))
    assert loglog_slope(scales, errors) == pytest.approx(2.0, abs=0.2)


def test_simple_perturbation_refuses_ill_conditioned_pair():
    pair = eigenpairs(A)[0]
    with pytest.raises(IllConditionedEigenvalueError):
        simple_perturbation(pair, np.ones(3), E, condition_floor=1.1)


def test_match_to_reference():
    matched = match_to_reference([3.0, 1.1, 2.2, 9.0], [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(matched, [1.1, 2.2, 3.0])


def test_chain_eigenvalue_shift_is_second_order_accurate(chain, config):
    radii = [1e-3, 3e-3, 1e-2]
    weights = weight_matrix(chain)
    reference = eigenpairs(weighted_capacitance(capacitance_matrix(chain, config), weights))
    errors = []
    for radius in radii:
        scene = chain.with_defect((3.0, 0.0, 0.0), radius)
        direct = perturbed_capacitance_direct(scene, config).resonator_block()
        exact = np.linalg.eigvals(weights.values[:, None] * direct)
        correction = first_order_correction(BlockSingleLayer.from_scene(scene, config))
        pair = reference[0]
        predicted = simple_perturbation(pair, weight_matrix(scene), correction).eigenvalues[0]
        errors.append(abs(match_to_reference(exact, [pair.eigenvalue])[0] - predicted))
    assert loglog_slope(radii, errors) == pytest.approx(2.0, abs=0.3)


def test_jordan_block_splits_by_square_root():
    a = 2.0
    block = np.array([[a, 1.0], [0.0, a]])
    chain = jordan_chain(block, a, 2)
    assert chain.chain_residual(block) < 1e-12
    assert chain.normalization_error() < 1e-12
    for eps in (1e-4, 1e-6):
        perturbation = np.array([[0.0, 0.0], [eps, 0.0]])
        result = ep_perturbation(chain, np.ones(2), perturbation)
        assert result.xi == pytest.approx(eps)
        np.testing.assert_allclose(
            np.sort_complex(result.eigenvalues), [a - np.sqrt(eps), a + np.sqrt(eps)], atol=1e-12
        )


def test_order_three_chain_gives_cube_roots():
    nilpotent = np.diag([1.0, 1.0], k=1)
    chain = jordan_chain(nilpotent, 0.0, 3)
    eps = 1e-6
    perturbation = np.zeros((3, 3))
    perturbation[2, 0] = eps
    result = ep_perturbation(chain, np.ones(3), perturbation, regime=1e-3)
    assert result.order == 3
    exact = np.linalg.eigvals(nilpotent + perturbation)
    np.testing.assert_allclose(
        match_to_reference(result.eigenvalues, exact), exact, atol=1e-10
    )
    np.testing.assert_allclose(np.abs(result.eigenvalues), eps ** (1 / 3))
    assert result.remainder_estimate == pytest.approx(1e-3 ** (2 / 3))


def test_zero_xi_gives_coincident_branches():
    block = np.array([[1.0, 1.0], [0.0, 1.0]])
    result = ep_perturbation(jordan_chain(block, 1.0), np.ones(2), np.zeros((2, 2)))
    np.testing.assert_array_equal(result.eigenvalues, [1.0, 1.0])


@pytest.mark.parametrize(
    "matrix, eigenvalue",
    [(np.diag([1.0, 2.0, 3.0]), 1.0), (np.diag([1.0, 2.0, 3.0]), 1.5), (np.eye(2), 1.0)],
)
def test_not_defective(matrix, eigenvalue):
    with pytest.raises(NotDefectiveError):
        jordan_chain(matrix, eigenvalue, 2)


def test_jordan_chain_order_must_be_at_least_two():
    with pytest.raises(ValueError):
        jordan_chain(np.array([[1.0, 1.0], [0.0, 1.0]]), 1.0, 1)


def test_shift_sweep_simple_rates(tiny_defect_scene):
    sweep = shift_sweep(tiny_defect_scene, [1e-4, 3e-4, 1e-3], DiscretizationConfig(max_degree=2))
    assert sweep.kinds == ("simple", "simple", "simple")
    np.testing.assert_array_equal(sweep.radii, [1e-4, 3e-4, 1e-3])
    slopes = sweep.slopes()
    for slope in slopes["direct"] + slopes["predicted"]:
        assert slope == pytest.approx(1.0, abs=0.15)
    for j in range(3):
        np.testing.assert_allclose(sweep.predicted_shifts(j), sweep.direct_shifts(j), rtol=0.05)


def test_shift_sweep_arguments(chain, tiny_defect_scene):
    with pytest.raises(MissingDefectError):
        shift_sweep(chain, [1e-4])
    with pytest.raises(ValueError):
        shift_sweep(tiny_defect_scene, [])
