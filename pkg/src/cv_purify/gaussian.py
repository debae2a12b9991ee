"""Gaussian-state primitives in shot-noise units.

Conventions shared by the whole package:

* quadratures ``X = a + a^dag`` and ``P = i(a^dag - a)``, so the vacuum has
  unit variance on each quadrature and ``<X> + i<P> = 2<a>``;
* two-mode covariance matrices are ordered ``(X_A, P_A, X_B, P_B)``, with
  mode A the one sent through the channel and mode B the one kept;
* the symplectic form is block-diagonal ``[[0, 1], [-1, 0]]`` per mode in
  the same ordering, and a covariance matrix is physical when
  ``cov + i*Omega >= 0``.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChannelParams",
    "TwoModeGaussianState",
    "ConditionalState",
    "symplectic_form",
    "epr_variance",
    "epr_after_channel",
    "conditional_after_heterodyne",
    "alice_reduced_norm",
]


def symplectic_form(n_modes: int = 2) -> np.ndarray:
    """Symplectic form for `n_modes` modes in (X_1, P_1, X_2, P_2, ...) order."""
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


@dataclass(frozen=True)
class ChannelParams:
    """Physical channel: transmission and input-referred excess noise.

    An input state of variance V is mapped to variance
    ``T*(V + (1-T)/T + excess_noise)``, both in shot-noise units.
    """

    transmission: float
    excess_noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError(f"transmission must be in [0, 1], got {self.transmission}")
        if self.excess_noise < 0.0:
            raise ValueError(f"excess noise must be >= 0, got {self.excess_noise}")

    @property
    def is_identity(self) -> bool:
        return self.transmission == 1.0 and self.excess_noise == 0.0


@dataclass(frozen=True)
class TwoModeGaussianState:
    """Two-mode Gaussian state: 4x4 covariance matrix and length-4 mean vector."""

    cov: np.ndarray
    disp: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def symmetrized_cov(self) -> np.ndarray:
        return 0.5 * (self.cov + self.cov.T)

    def physicality_gap(self) -> float:
        """Smallest eigenvalue of cov + i*Omega; >= -tol for a physical state."""
        m = self.symmetrized_cov() + 1j * symplectic_form(2)
        return float(np.linalg.eigvalsh(m).min())

    def is_physical(self, tol: float = 1e-9) -> bool:
        return self.physicality_gap() >= -tol


@dataclass(frozen=True)
class ConditionalState:
    """Bob's mode after the dual-homodyne projection, up to a displacement.

    The state is a thermal state of variance ``variance`` displaced by
    ``disp_gain * conj(beta)`` where ``beta`` is the heterodyne outcome; the
    conjugation means the displacement follows the ``(beta_x, -beta_p)``
    pattern.  ``alice_thermal_param`` is the thermal parameter of the
    measured (Alice-side) mode, which fixes the outcome distribution.
    """

    variance: float
    thermal_param: float
    disp_gain: float
    alice_thermal_param: float
    conjugated_displacement: bool = True


def epr_variance(chi: float) -> float:
    """Quadrature variance (1 + chi^2)/(1 - chi^2) of an EPR state's modes."""
    if not 0.0 <= chi < 1.0:
        raise ValueError(f"EPR parameter must be in [0, 1), got {chi}")
    return (1.0 + chi * chi) / (1.0 - chi * chi)


def epr_after_channel(chi: float, channel: ChannelParams) -> TwoModeGaussianState:
    """Two-mode EPR state with mode A sent through the lossy, noisy channel.

    Parameters
    ----------
    chi : float
        EPR parameter in [0, 1).
    channel : ChannelParams
        Channel traversed by mode A.

    Returns
    -------
    TwoModeGaussianState
        Blocks Gamma_A = T*(V + (1-T)/T + eps)*I, C = sqrt(T*(V^2-1))*Z and
        Gamma_B = V*I with V = (1+chi^2)/(1-chi^2); zero displacement.
    """
    v = epr_variance(chi)
    t = channel.transmission
    eps = channel.excess_noise
    va = t * v + (1.0 - t) + t * eps
    c = np.sqrt(t * (v * v - 1.0))
    cov = np.diag([va, va, v, v])
    cov[0, 2] = cov[2, 0] = c
    cov[1, 3] = cov[3, 1] = -c
    return TwoModeGaussianState(cov=cov)


def conditional_after_heterodyne(state: TwoModeGaussianState) -> ConditionalState:
    """Condition mode B of an EPR-after-channel state on a heterodyne of mode A.

    Uses the Gaussian conditioning rule: the covariance of the kept mode is
    the Schur complement ``Gamma_B - C^T (Gamma_A + I)^-1 C`` and its mean is
    linear in the outcome with gain matrix ``C^T (Gamma_A + I)^-1``.  The
    result does not depend on the outcome itself.
    """
    cov = state.symmetrized_cov()
    gamma_a = cov[:2, :2]
    gamma_b = cov[2:, 2:]
    c = cov[:2, 2:]
    inv = np.linalg.inv(gamma_a + np.eye(2))
    schur = gamma_b - c.T @ inv @ c
    vb = float(schur[0, 0])
    if abs(schur[0, 1]) > 1e-12 or abs(schur[0, 0] - schur[1, 1]) > 1e-12:
        raise ValueError("conditional covariance is not isotropic; "
                         "state was not produced by epr_after_channel")
    gain = c.T @ inv
    lam_b = np.sqrt(max(vb - 1.0, 0.0) / (vb + 1.0))
    va = float(gamma_a[0, 0])
    chi_bar = np.sqrt(max(va - 1.0, 0.0) / (va + 1.0))
    return ConditionalState(
        variance=vb,
        thermal_param=float(lam_b),
        disp_gain=float(gain[0, 0]),
        alice_thermal_param=float(chi_bar),
        conjugated_displacement=bool(gain[1, 1] <= 0.0),
    )


def alice_reduced_norm(alice_thermal_param: float, beta: complex) -> float:
    """Outcome density of the heterodyne on Alice's reduced thermal mode.

    Returns ``(1/2pi) * (1 - lam^2) * exp((lam^2 - 1) |beta|^2)`` for thermal
    parameter ``lam``; this is the normalization of the conditional state for
    outcome ``beta``.
    """
    lam = alice_thermal_param
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"thermal parameter must be in [0, 1), got {lam}")
    return (1.0 - lam * lam) / (2.0 * np.pi) * np.exp((lam * lam - 1.0) * abs(beta) ** 2)
