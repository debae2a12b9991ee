"""Distillation analysis of a dual-rail Bell state.

A maximally entangled photonic state (one photon shared between an H and a
V rail per side) is degraded either by the bare lossy channel or by the
teleporter in its unit-transmission regime, where the only imperfection is
the effective excess noise ``delta``.  Detection keeps the events where
Bob's side holds exactly one photon; the CHSH quantity and concurrence are
reported both conditioned on those events and weighted by their
probability.

Closed forms are validated by :func:`noisy_bell_oracle`, which applies the
random-displacement noise to each rail in the Fock space, projects and
measures.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channels import displacement_noise_superop
from .grids import PhaseSpaceGrid

__all__ = [
    "BellTestResult",
    "chsh_operator",
    "chsh_loss",
    "chsh_tele",
    "concurrence_tele",
    "wootters_concurrence",
    "noisy_bell_oracle",
    "loss_transmission_threshold",
    "tele_noise_threshold",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# two-qubit basis order is (HH, HV, VH, VV) with H -> |0>, V -> |1>
BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class BellTestResult:
    """CHSH and concurrence figures for one scenario.

    ``s = p_check * s_cond`` and ``c = p_check * c_cond`` weight the
    conditional values by the probability that Bob's side is conclusive
    (exactly one photon across his two rails).
    """

    scenario: str
    p_check: float
    s_cond: float
    s: float
    c_cond: float
    c: float


def chsh_operator() -> np.ndarray:
    """Bell operator A1 (B1 + B2) + A2 (B1 - B2) on the two-qubit space.

    Alice measures (sigma_z +/- sigma_x)/sqrt(2), Bob measures sigma_z and
    sigma_x; the mean on a Bell state is 2 sqrt(2).
    """
    a1 = (SIGMA_Z + SIGMA_X) / np.sqrt(2.0)
    a2 = (SIGMA_Z - SIGMA_X) / np.sqrt(2.0)
    return np.kron(a1, SIGMA_Z + SIGMA_X) + np.kron(a2, SIGMA_Z - SIGMA_X)


def chsh_loss(transmission: float) -> BellTestResult:
    """Bare lossy channel: the photon arrives (conclusive, still maximally
    entangled) with probability T or is lost, so S = 2 sqrt(2) T and C = T."""
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must be in [0, 1], got {transmission}")
    s_cond = 2.0 * np.sqrt(2.0)
    return BellTestResult(
        scenario="loss",
        p_check=float(transmission),
        s_cond=s_cond,
        s=float(transmission * s_cond),
        c_cond=1.0,
        c=float(transmission),
    )


def chsh_tele(delta: float) -> BellTestResult:
    """Teleporter in the unit-transmission regime with excess noise `delta`.

    p_check = (1 + delta^2/2) / (1 + delta/2)^4,
    S_cond  = 2 sqrt(2) / (1 + delta^2/2),
    so the weighted value is S = 2 sqrt(2) / (1 + delta/2)^4.
    """
    if delta < 0.0:
        raise ValueError(f"excess noise must be >= 0, got {delta}")
    half = 0.5 * delta
    p_check = (1.0 + delta ** 2 / 2.0) / (1.0 + half) ** 4
    s_cond = 2.0 * np.sqrt(2.0) / (1.0 + delta ** 2 / 2.0)
    c_cond, c = concurrence_tele(delta)
    return BellTestResult(
        scenario="teleporter",
        p_check=float(p_check),
        s_cond=float(s_cond),
        s=float(p_check * s_cond),
        c_cond=c_cond,
        c=c,
    )


def concurrence_tele(delta: float):
    """Conditional and weighted concurrence of the teleported Bell state.

    C_cond = 3/(delta^2 + 2) - 1/2 and C = (1 - delta/2)/(1 + delta/2)^3.
    """
    if delta < 0.0:
        raise ValueError(f"excess noise must be >= 0, got {delta}")
    c_cond = 3.0 / (delta ** 2 + 2.0) - 0.5
    half = 0.5 * delta
    c = (1.0 - half) / (1.0 + half) ** 3
    return float(c_cond), float(c)


def wootters_concurrence(rho: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix.

    ``max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`` with l_k the
    decreasing eigenvalues of ``rho (sy x sy) rho^T (sy x sy)``; negative
    numerical eigenvalues are clamped to zero before the square root.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 two-qubit density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise ValueError("density matrix is not Hermitian within 1e-8")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError(f"density matrix trace {np.trace(rho).real} is not 1")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise ValueError("density matrix is not positive semidefinite within 1e-8")
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    spin_flipped = yy @ rho.conj() @ yy
    lam = np.linalg.eigvals(rho @ spin_flipped).real
    lam = np.sqrt(np.clip(lam, 0.0, None))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def noisy_bell_oracle(delta: float, grid: PhaseSpaceGrid | None = None,
                      dim: int = 8, points_per_axis: int = 40):
    """Fock-space check of the teleported-Bell closed forms.

    Applies independent random-displacement channels (per-quadrature added
    variance `delta`, weight parameter delta/2) to Bob's two rails of the
    dual-rail Bell state, projects onto the one-photon subspace, and
    measures.  The effective amplifier is omitted here because the Bell
    state is one of its eigenstates; it only rescales the success
    probability.

    Returns
    -------
    (p_check, s_cond, c_cond) : tuple of float
    """
    if delta < 0.0:
        raise ValueError(f"excess noise must be >= 0, got {delta}")
    if dim < 6:
        raise ValueError("dual-rail oracle needs dim >= 6 once noise populates n >= 2")
    # state on (alice qubit, rail 1, rail 2); |H> = |1, 0>, |V> = |0, 1>
    psi = np.zeros((2, dim, dim), dtype=complex)
    psi[0, 1, 0] = 1.0 / np.sqrt(2.0)
    psi[1, 0, 1] = 1.0 / np.sqrt(2.0)
    rho = np.einsum("iab,jcd->iabjcd", psi, psi.conj())
    if delta > 0.0:
        sup = displacement_noise_superop(delta, dim, grid=grid,
                                         points_per_axis=points_per_axis)
        s4 = sup.reshape(dim, dim, dim, dim)
        rho = np.einsum("acAC,iAbjCd->iabjcd", s4, rho, optimize=True)
        rho = np.einsum("bdBD,iaBjcD->iabjcd", s4, rho, optimize=True)
    # project Bob's rails on span{|1,0>, |0,1>} -> two-qubit state (HH, HV, VH, VV)
    rail_basis = ((1, 0), (0, 1))
    rho4 = np.empty((2, 2, 2, 2), dtype=complex)
    for b, (r1, r2) in enumerate(rail_basis):
        for bp, (r1p, r2p) in enumerate(rail_basis):
            rho4[:, b, :, bp] = rho[:, r1, r2, :, r1p, r2p]
    rho4 = rho4.reshape(4, 4)
    p_check = float(np.trace(rho4).real)
    rho4 /= p_check
    s_cond = float(np.trace(chsh_operator() @ rho4).real)
    c_cond = wootters_concurrence(rho4)
    return p_check, s_cond, c_cond


def loss_transmission_threshold() -> float:
    """Transmission where the loss-only CHSH value crosses the classical bound 2."""
    return float(brentq(lambda t: chsh_loss(t).s - 2.0, 0.1, 1.0, xtol=1e-14))


def tele_noise_threshold() -> float:
    """Excess noise where the teleported CHSH value crosses the classical bound 2."""
    return float(brentq(lambda d: chsh_tele(d).s - 2.0, 0.0, 2.0, xtol=1e-14))
