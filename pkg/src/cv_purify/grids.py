"""Deterministic quadrature over the complex plane.

All phase-space integrals in the package run over a tensor Gauss-Legendre
grid on the square [-R, R]^2 covering the Gaussian envelope of the
integrand; R is chosen so the envelope tail outside the grid is negligible.
Quadrature is deterministic, so every tolerance in the test suite is
reproducible without a seed policy.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseSpaceGrid",
    "square_grid",
    "gaussian_tail_radius",
    "gaussian_probe_error",
]


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Complex nodes and real weights for an integral over d^2 gamma."""

    nodes: np.ndarray
    weights: np.ndarray
    radius: float
    points_per_axis: int

    def integrate(self, values: np.ndarray) -> complex:
        return np.tensordot(self.weights, values, axes=(0, 0))


def square_grid(radius: float, points_per_axis: int) -> PhaseSpaceGrid:
    """Tensor Gauss-Legendre grid on [-R, R]^2 in Cartesian form."""
    if radius <= 0 or points_per_axis < 2:
        raise ValueError("grid needs positive radius and at least 2 points per axis")
    x, w = np.polynomial.legendre.leggauss(points_per_axis)
    x = radius * x
    w = radius * w
    re, im = np.meshgrid(x, x, indexing="ij")
    wr, wi = np.meshgrid(w, w, indexing="ij")
    return PhaseSpaceGrid(
        nodes=(re + 1j * im).ravel(),
        weights=(wr * wi).ravel(),
        radius=float(radius),
        points_per_axis=int(points_per_axis),
    )


def gaussian_tail_radius(rate: float, center: float = 0.0, tail: float = 1e-12,
                         safety: float = 1.1) -> float:
    """Radius R with exp(-rate * (R - center)^2) <= tail."""
    if rate <= 0:
        raise ValueError(f"decay rate must be positive, got {rate}")
    return center + safety * np.sqrt(np.log(1.0 / tail) / rate)


def gaussian_probe_error(grid: PhaseSpaceGrid, variance: float = 1.0) -> float:
    """Self-test: |integral of exp(-|g|^2/var)/(pi var) - 1| over the grid."""
    f = np.exp(-np.abs(grid.nodes) ** 2 / variance) / (np.pi * variance)
    return abs(float(np.real(grid.integrate(f))) - 1.0)
