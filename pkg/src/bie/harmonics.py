"""Real orthonormal spherical harmonics and product quadrature on the sphere."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import factorial, lpmv


def harmonic_count(max_degree: int) -> int:
    """Basis dimension (L+1)² for truncation degree L."""
    return (max_degree + 1) ** 2


def harmonic_index(degree: int, order: int) -> int:
    """Position of Y_n^m in the basis ordering n = 0..L, m = -n..n."""
    return degree * degree + degree + order


@lru_cache(maxsize=32)
def harmonic_degrees(max_degree: int) -> np.ndarray:
    """Degree n of every basis function."""
    degrees = np.concatenate([np.full(2 * n + 1, n) for n in range(max_degree + 1)])
    degrees.setflags(write=False)
    return degrees


def real_harmonics(max_degree: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """
    Evaluate all real orthonormal spherical harmonics up to ``max_degree``.

    Y_n^0 = N_n0 P_n(cos θ); for m > 0, Y_n^m = √2 N_nm P_n^m(cos θ) cos(mφ) and
    Y_n^{-m} = √2 N_nm P_n^m(cos θ) sin(mφ), with
    N_nm = sqrt((2n+1)/(4π) (n-m)!/(n+m)!), so that ∫ Y_p Y_q dΩ = δ_pq.

    Args:
        max_degree: Truncation degree L
        theta: Polar angles, shape (P,)
        phi: Azimuthal angles, shape (P,)

    Returns:
        Array of shape (P, (L+1)²)
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    x = np.cos(theta)
    values = np.empty((theta.size, harmonic_count(max_degree)))

    for n in range(max_degree + 1):
        for m in range(n + 1):
            norm = np.sqrt((2 * n + 1) / (4 * np.pi) * factorial(n - m) / factorial(n + m))
            legendre = norm * lpmv(m, n, x)
            if m == 0:
                values[:, harmonic_index(n, 0)] = legendre
            else:
                values[:, harmonic_index(n, m)] = np.sqrt(2) * legendre * np.cos(m * phi)
                values[:, harmonic_index(n, -m)] = np.sqrt(2) * legendre * np.sin(m * phi)

    return values


@lru_cache(maxsize=32)
def sphere_quadrature(order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Gauss-Legendre (in cos θ) × trapezoid (in φ) rule on the unit sphere.

    Args:
        order: Gauss points in θ; the trapezoid rule uses 2·order points in φ

    Returns:
        (theta, phi, weights), flattened, with weights summing to 4π
    """
    nodes, gauss_weights = np.polynomial.legendre.leggauss(order)
    n_phi = 2 * order
    phi_nodes = 2 * np.pi * np.arange(n_phi) / n_phi

    theta_grid, phi_grid = np.meshgrid(np.arccos(nodes), phi_nodes, indexing="ij")
    weights = np.outer(gauss_weights, np.full(n_phi, 2 * np.pi / n_phi))

    theta, phi, weights = theta_grid.ravel(), phi_grid.ravel(), weights.ravel()
    for array in (theta, phi, weights):
        array.setflags(write=False)
    return theta, phi, weights


def unit_directions(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Cartesian unit vectors for spherical angles, shape (P, 3)."""
    sin_theta = np.sin(theta)
    return np.column_stack((sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)))
