"""Tests for the real harmonic basis and the sphere quadrature."""

import numpy as np
import pytest

from src.bie import (
    harmonic_count,
    harmonic_degrees,
    harmonic_index,
    real_harmonics,
    sphere_quadrature,
)


def test_basis_ordering():
    assert harmonic_count(0) == 1
    assert harmonic_count(3) == 16
    assert [harmonic_index(n, m) for n, m in [(0, 0), (1, -1), (1, 0), (1, 1), (2, -2)]] == [0, 1, 2, 3, 4]
    np.testing.assert_array_equal(harmonic_degrees(2), [0, 1, 1, 1, 2, 2, 2, 2, 2])


def test_quadrature_weights_sum_to_sphere_area():
    _, _, weights = sphere_quadrature(7)
    assert weights.sum() == pytest.approx(4.0 * np.pi, rel=1e-14)


def test_quadrature_arrays_are_read_only():
    theta, _, _ = sphere_quadrature(3)
    with pytest.raises(ValueError):
        theta[0] = 1.0


def test_constant_harmonic_value():
    values = real_harmonics(0, np.array([0.3, 2.0]), np.array([1.2, 4.0]))
    np.testing.assert_allclose(values[:, 0], 1.0 / np.sqrt(4.0 * np.pi))


def test_zonal_degree_one():
    theta = np.array([0.0, 0.7, np.pi / 2])
    values = real_harmonics(1, theta, np.zeros(3))
    np.testing.assert_allclose(
        values[:, harmonic_index(1, 0)], np.sqrt(3.0 / (4.0 * np.pi)) * np.cos(theta), atol=1e-15
    )


@pytest.mark.parametrize("max_degree", [0, 2, 5])
def test_harmonics_are_orthonormal(max_degree):
    theta, phi, weights = sphere_quadrature(2 * (max_degree + 1))
    values = real_harmonics(max_degree, theta, phi)
    gram = values.T @ (values * weights[:, None])
    np.testing.assert_allclose(gram, np.eye(harmonic_count(max_degree)), atol=1e-12)
