"""Tests for the reflection operators and the multiple-scattering expansion."""

import numpy as np
import pytest

import src.scattering.blocks as blocks_module
from src.bie import DiscretizationConfig
from src.capacitance import capacitance_matrix, perturbed_capacitance_direct
from src.errors import DivergenceError, MissingDefectError
from src.scattering import (
    BlockSingleLayer,
    capacitance_expansion,
    first_order_correction,
    neumann_partial_sum,
    reflections,
    spectral_radius,
    truncation_report,
    zeroth_order_coupling,
)
from src.utils import loglog_slope

SMALL_RADII = [1e-3, 3e-3, 1e-2, 3e-2]


def _embedded(matrix):
    """Resonator matrix padded with a zero defect row and column."""
    n = matrix.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = matrix
    return out


def _errors(scene, config):
    """(‖C̃ - blockdiag(C, 0)‖, ‖C̃ - blockdiag(C, 0) - Z₀ - E‖) for one scene."""
    direct = perturbed_capacitance_direct(scene, config).entries
    base = _embedded(capacitance_matrix(scene, config).entries)
    blocks = BlockSingleLayer.from_scene(scene, config)
    leading = base + zeroth_order_coupling(blocks) + first_order_correction(blocks).E
    return np.linalg.norm(direct - base, 2), np.linalg.norm(direct - leading, 2)


@pytest.mark.parametrize("degree", [4, pytest.param(6, marks=pytest.mark.slow)])
def test_full_expansion_matches_direct_solve(defect_scene, degree):
    config = DiscretizationConfig(max_degree=degree)
    blocks = BlockSingleLayer.from_scene(defect_scene, config)
    expansion = capacitance_expansion(blocks, 12)
    direct = perturbed_capacitance_direct(defect_scene, config).entries
    np.testing.assert_allclose(
        expansion.partial_sum, direct, atol=1e-10 * np.max(np.abs(direct))
    )
    assert expansion.capacitance().labels == ("D1", "D2", "D3", "Omega")


def test_order_zero_terms(chain, defect_scene, config):
    blocks = BlockSingleLayer.from_scene(defect_scene, config)
    term = capacitance_expansion(blocks, 0).terms[0]
    np.testing.assert_allclose(term[:3, :3], capacitance_matrix(chain, config).entries, rtol=1e-12)
    assert term[3, 3] == pytest.approx(4.0 * np.pi * 1e-2, rel=1e-12)


def test_zeroth_order_coupling_has_empty_resonator_block(defect_scene, config):
    coupling = zeroth_order_coupling(BlockSingleLayer.from_scene(defect_scene, config))
    assert not np.any(coupling[:3, :3])
    assert coupling[3, 3] > 0
    np.testing.assert_allclose(coupling[:3, 3], coupling[3, :3], rtol=1e-10)


def test_term_norms_decay(defect_scene, config):
    norms = capacitance_expansion(BlockSingleLayer.from_scene(defect_scene, config), 4).term_norms()
    assert all(later < earlier for earlier, later in zip(norms, norms[1:]))


def test_errors_scale_with_defect_radius(chain, config):
    leading, residual = zip(*(_errors(chain.with_defect((3, 0, 0), r), config) for r in SMALL_RADII))
    assert loglog_slope(SMALL_RADII, leading) == pytest.approx(1.0, abs=0.1)
    assert loglog_slope(SMALL_RADII, residual) == pytest.approx(2.0, abs=0.2)


def test_errors_decay_with_distance(chain, config):
    radius = 1e-2
    distances = [1.0, 2.0, 4.0, 8.0]
    dd_errors, residuals = [], []
    for d in distances:
        scene = chain.with_defect((2.0 + 1.0 / 3.0 + radius + d, 0, 0), radius)
        direct = perturbed_capacitance_direct(scene, config).entries
        dd_errors.append(
            np.linalg.norm(direct[:3, :3] - capacitance_matrix(chain, config).entries, 2)
        )
        residuals.append(_errors(scene, config)[1])
    assert loglog_slope(distances, dd_errors) <= -0.85
    assert loglog_slope(distances, residuals) <= -1.7


def test_reflection_norm_scales_with_radius(chain, config):
    radii = [1e-3, 3e-3, 1e-2]
    norms = [
        reflections(BlockSingleLayer.from_scene(chain.with_defect((3, 0, 0), r), config)).norm_D
        for r in radii
    ]
    assert loglog_slope(radii, norms) == pytest.approx(1.0, abs=0.15)


def test_far_defect_decouples(chain, config):
    blocks = BlockSingleLayer.from_scene(chain.with_defect((1e3, 0, 0), 1e-2), config)
    assert reflections(blocks).norm_D <= 1e-6
    assert np.linalg.norm(first_order_correction(blocks).E, 2) <= 1e-6


def test_reflections_share_spectrum(defect_scene, config):
    operators = reflections(BlockSingleLayer.from_scene(defect_scene, config))
    top_D = np.sort(np.abs(np.linalg.eigvals(operators.T_D)))[::-1][:3]
    top_O = np.sort(np.abs(np.linalg.eigvals(operators.T_O)))[::-1][:3]
    np.testing.assert_allclose(top_D, top_O, rtol=1e-6, atol=1e-12 * top_O[0])
    assert operators.convergent
    assert operators.spectral_radius == pytest.approx(top_O[0], rel=0.05)


def test_spectral_radius_of_diagonal_matrix():
    assert spectral_radius(np.diag([0.5, 0.1, -0.05])) == pytest.approx(0.5, rel=1e-4)
    assert spectral_radius(np.zeros((3, 3))) == 0.0


def test_correction_blocks(defect_scene, config):
    correction = first_order_correction(BlockSingleLayer.from_scene(defect_scene, config))
    assert correction.resonator_count == 3
    assert correction.E11.shape == (3, 3)
    assert correction.E12.shape == (3, 1)
    assert correction.E22.shape == (1, 1)
    np.testing.assert_allclose(correction.E12.ravel(), correction.E21.ravel(), rtol=1e-8)


def test_truncation_report(chain, config):
    blocks = BlockSingleLayer.from_scene(chain.with_defect((3, 0, 0), 0.05), config)
    report = truncation_report(blocks, 5)
    assert [K for K, _ in report.as_rows()] == [1, 2, 3, 4, 5]
    assert report.monotone
    assert report.block_diagonal_error >= report.errors[0][1]
    assert report.reference_ratio == pytest.approx(np.sqrt(4 * np.pi) * 0.05 / (2 / 3 - 0.05))
    assert report.fitted_ratio is None or report.fitted_ratio <= 3.0 * report.reference_ratio


def test_neumann_sum_approaches_inverse(defect_scene, config):
    blocks = BlockSingleLayer.from_scene(defect_scene, config)
    inverse = np.linalg.inv(blocks.full_matrix)
    error = np.linalg.norm(inverse - neumann_partial_sum(blocks, 8), 2)
    assert error <= 1e-8 * np.linalg.norm(inverse, 2)


def test_argument_checks(chain, defect_scene, config):
    blocks = BlockSingleLayer.from_scene(defect_scene, config)
    with pytest.raises(ValueError):
        capacitance_expansion(blocks, -1)
    with pytest.raises(ValueError):
        neumann_partial_sum(blocks, 0)
    with pytest.raises(ValueError):
        truncation_report(blocks, 0)
    with pytest.raises(MissingDefectError):
        BlockSingleLayer.from_scene(chain, config)


def test_divergent_series_is_refused(defect_scene, config, monkeypatch):
    monkeypatch.setattr(blocks_module, "spectral_radius", lambda matrix: 2.0)
    with pytest.raises(DivergenceError):
        capacitance_expansion(BlockSingleLayer.from_scene(defect_scene, config), 1)
