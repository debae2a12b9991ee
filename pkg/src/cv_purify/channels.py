"""Gaussian channel realizations on the truncated Fock space.

Two constructions cover everything the protocol needs:

* a lossy channel with input-referred excess noise, realized transparently
  as a beamsplitter of matching transmission with a thermal state in the
  idle port, traced out (Kraus form);
* added thermal noise at unit transmission, realized as a Gaussian-weighted
  mixture of displacements (per-quadrature added variance ``delta`` means a
  weight ``exp(-|g|^2/(delta/2)) / (pi delta/2)``).
"""

import warnings

import numpy as np

from .fock import TruncationWarning, beamsplitter_unitary, displacement_matrices
from .grids import PhaseSpaceGrid, gaussian_tail_radius, square_grid

__all__ = [
    "loss_ancilla_param",
    "thermal_loss_kraus",
    "apply_kraus",
    "displacement_noise_grid",
    "apply_displacement_noise",
    "displacement_noise_superop",
]


def loss_ancilla_param(transmission: float, excess_noise: float) -> float:
    """Thermal parameter of the idle-port state of the beamsplitter dilation.

    The ancilla variance 1 + T*eps/(1-T) makes the dilated channel add
    `excess_noise` shot-noise units referred to the input.
    """
    t, eps = transmission, excess_noise
    if not 0.0 <= t < 1.0:
        raise ValueError(f"dilation needs transmission in [0, 1), got {t}")
    if eps < 0.0:
        raise ValueError(f"excess noise must be >= 0, got {eps}")
    v_anc = 1.0 + t * eps / (1.0 - t)
    return float(np.sqrt((v_anc - 1.0) / (v_anc + 1.0)))


def thermal_loss_kraus(transmission: float, excess_noise: float, dim: int,
                       tail_tol: float = 1e-8) -> list:
    """Kraus operators of the thermal-loss channel on a `dim`-level mode.

    Built from the two-mode beamsplitter dilation with a thermal ancilla;
    ancilla levels are kept until their total weight reaches 1 - tail_tol^2,
    and a warning is raised if that cannot be met.
    """
    lam = loss_ancilla_param(transmission, excess_noise)
    lam2 = lam * lam
    target = min(tail_tol, 1e-12)
    probs = []
    total = 0.0
    j = 0
    while total < 1.0 - target and j <= 80:
        p = (1.0 - lam2) * lam2 ** j if lam2 > 0 else (1.0 if j == 0 else 0.0)
        probs.append(p)
        total += p
        j += 1
        if lam2 == 0:
            break
    if 1.0 - total > tail_tol:
        warnings.warn(f"thermal ancilla tail {1.0 - total:.2e} above tolerance",
                      TruncationWarning, stacklevel=2)
    j_max = len(probs) - 1
    dj = dim + j_max
    theta = float(np.arccos(np.sqrt(transmission)))
    u = beamsplitter_unitary(theta, dj, dj).reshape(dj, dj, dj, dj)
    kraus = []
    for j, p in enumerate(probs):
        if p <= 0.0:
            continue
        for k in range(dj):
            block = u[:dim, k, :dim, j]
            if np.max(np.abs(block)) > 1e-300:
                kraus.append(np.sqrt(p) * block.astype(complex))
    return kraus


def apply_kraus(kraus, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    for k in kraus:
        out += k @ rho @ k.conj().T
    return out


def displacement_noise_grid(added_variance: float, points_per_axis: int = 40,
                            tail: float = 1e-13) -> PhaseSpaceGrid:
    """Grid sized for the Gaussian displacement weight of the noise channel."""
    delta_ch = added_variance / 2.0
    radius = gaussian_tail_radius(1.0 / delta_ch, tail=tail)
    return square_grid(radius, points_per_axis)


def apply_displacement_noise(rho: np.ndarray, added_variance: float,
                             grid: PhaseSpaceGrid | None = None,
                             points_per_axis: int = 40) -> np.ndarray:
    """Random-displacement channel adding `added_variance` per quadrature."""
    if added_variance < 0.0:
        raise ValueError(f"added variance must be >= 0, got {added_variance}")
    if added_variance == 0.0:
        return rho.copy()
    if grid is None:
        grid = displacement_noise_grid(added_variance, points_per_axis)
    delta_ch = added_variance / 2.0
    w = grid.weights * np.exp(-np.abs(grid.nodes) ** 2 / delta_ch) / (np.pi * delta_ch)
    dmats = displacement_matrices(grid.nodes, rho.shape[0])
    return np.einsum("g,gmk,kl,gnl->mn", w, dmats, rho, dmats.conj(), optimize=True)


def displacement_noise_superop(added_variance: float, dim: int,
                               grid: PhaseSpaceGrid | None = None,
                               points_per_axis: int = 40) -> np.ndarray:
    """Superoperator of the random-displacement channel, shape (dim^2, dim^2).

    Worth precomputing when the same channel hits several modes, as in the
    dual-rail Bell scenario.
    """
    if grid is None:
        grid = displacement_noise_grid(added_variance, points_per_axis)
    delta_ch = added_variance / 2.0
    w = grid.weights * np.exp(-np.abs(grid.nodes) ** 2 / delta_ch) / (np.pi * delta_ch)
    dmats = displacement_matrices(grid.nodes, dim)
    s = np.einsum("g,gmk,gnl->mnkl", w, dmats, dmats.conj(), optimize=True)
    return s.reshape(dim * dim, dim * dim)
