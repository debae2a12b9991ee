"""Truncated Fock-space primitives.

Operators and states are plain complex numpy arrays on a space of dimension
``dim`` (Fock levels 0 .. dim-1).  Displacement amplitudes follow the
package convention ``<X> + i<P> = 2 alpha``; displacement matrix elements
use the associated-Laguerre closed form rather than exponentiating truncated
mode operators, so small-dimension behavior is bit-stable.
"""

import warnings
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

__all__ = [
    "TruncationWarning",
    "annihilation_operator",
    "fock_state",
    "coherent_state",
    "thermal_populations",
    "thermal_state",
    "displacement_matrix",
    "displacement_matrices",
    "displaced_thermal",
    "nla_operator",
    "beamsplitter_unitary",
    "x_quadrature_wavefunctions",
    "check_density_matrix",
]


class TruncationWarning(UserWarning):
    """The truncated space drops more probability mass than the tolerance."""


def annihilation_operator(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def fock_state(n: int, dim: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise ValueError(f"Fock level {n} outside truncated space of dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Coherent state vector, normalized before truncation."""
    n = np.arange(dim)
    log_fact = gammaln(n + 1)
    amps = np.exp(-abs(alpha) ** 2 / 2) * np.asarray(alpha, complex) ** n \
        / np.sqrt(np.exp(log_fact))
    return amps


def thermal_populations(thermal_param: float, dim: int) -> np.ndarray:
    """Fock populations (1 - lam^2) lam^(2n) of a thermal state."""
    lam = thermal_param
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"thermal parameter must be in [0, 1), got {lam}")
    n = np.arange(dim)
    return (1.0 - lam * lam) * lam ** (2 * n)


def thermal_state(thermal_param: float, dim: int) -> np.ndarray:
    """Thermal state of variance (1 + lam^2)/(1 - lam^2) as a density matrix."""
    return np.diag(thermal_populations(thermal_param, dim)).astype(complex)


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Matrix elements <m|D(alpha)|n> from the associated-Laguerre closed form."""
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    lo = np.minimum(m, n)
    k = np.abs(m - n)
    x = abs(alpha) ** 2
    pref = np.exp(0.5 * (gammaln(lo + 1) - gammaln(lo + k + 1)))
    base = np.where(m >= n, complex(alpha), -np.conj(complex(alpha)))
    return pref * base ** k * np.exp(-x / 2) * eval_genlaguerre(lo, k, x)


def displacement_matrices(alphas, dim: int) -> np.ndarray:
    """Batched <m|D(alpha)|n> for an array of amplitudes, shape (..., dim, dim).

    Built from the exact first row <0|D|n> and the recurrence
    ``sqrt(m+1) D[m+1, n] = alpha D[m, n] + sqrt(n) D[m, n-1]``; agrees with
    :func:`displacement_matrix` to machine precision.
    """
    alphas = np.asarray(alphas, dtype=complex)
    n = np.arange(dim)
    out = np.zeros(alphas.shape + (dim, dim), dtype=complex)
    out[..., 0, :] = (np.exp(-np.abs(alphas)[..., None] ** 2 / 2)
                      * (-np.conj(alphas[..., None])) ** n
                      / np.sqrt(np.exp(gammaln(n + 1))))
    sqrt_n = np.sqrt(n)
    for m in range(dim - 1):
        nxt = alphas[..., None] * out[..., m, :]
        nxt[..., 1:] += sqrt_n[1:] * out[..., m, :-1]
        out[..., m + 1, :] = nxt / np.sqrt(m + 1.0)
    return out


def displaced_thermal(thermal_param: float, alpha: complex, dim: int,
                      tail_tol: float = 1e-8) -> np.ndarray:
    """Displaced thermal state D(alpha) rho_th(lam) D(alpha)^dag.

    Warns when the truncated space loses more than `tail_tol` of the trace.
    """
    d = displacement_matrix(alpha, dim)
    rho = (d * thermal_populations(thermal_param, dim)[None, :]) @ d.conj().T
    loss = abs(1.0 - np.trace(rho).real)
    if loss > tail_tol:
        warnings.warn(f"displaced thermal state loses {loss:.2e} of trace at "
                      f"dim={dim}", TruncationWarning, stacklevel=2)
    return rho


def nla_operator(gain: float, dim: int) -> np.ndarray:
    """Noiseless-amplifier operator gain^n as a diagonal matrix.

    Restricted to gain in (0, 1]; above 1 the operator is unbounded and the
    emulated version needs a cut-off, which is out of scope.
    """
    if not 0.0 < gain <= 1.0:
        raise ValueError(f"gain must be in (0, 1], got {gain}")
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    return np.diag(gain ** np.arange(dim)).astype(complex)


@lru_cache(maxsize=32)
def beamsplitter_unitary(theta: float, dim_a: int, dim_b: int) -> np.ndarray:
    """exp[theta (a^dag b - a b^dag)] on the truncated two-mode space.

    The generator conserves total photon number, so the exponential is taken
    block-by-block; the result is exactly unitary on the truncated space.
    Row/column index is ``m_a * dim_b + n_b``.
    """
    u = np.zeros((dim_a * dim_b, dim_a * dim_b))
    for n_tot in range(dim_a + dim_b - 1):
        ms = np.arange(max(0, n_tot - dim_b + 1), min(n_tot, dim_a - 1) + 1)
        flat = ms * dim_b + (n_tot - ms)
        size = len(ms)
        gen = np.zeros((size, size))
        for i in range(size - 1):
            # <m+1, k-1| a^dag b |m, k> = sqrt((m+1) k)
            el = np.sqrt((ms[i] + 1.0) * (n_tot - ms[i]))
            gen[i + 1, i] = theta * el
            gen[i, i + 1] = -theta * el
        u[np.ix_(flat, flat)] = expm(gen)
    u.flags.writeable = False  # cached; callers must not mutate
    return u


def x_quadrature_wavefunctions(x, dim: int) -> np.ndarray:
    """Overlaps <x|n> of X-quadrature eigenstates with Fock states.

    In shot-noise units <x|0> = exp(-x^2/4)/(2 pi)^(1/4); the P-quadrature
    overlaps follow as ``<p|n> = <x=p|n> * (-i)^n``.  Returns an array of
    shape (len(x), dim).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((len(x), dim))
    out[:, 0] = np.exp(-x ** 2 / 4) / (2 * np.pi) ** 0.25
    if dim > 1:
        out[:, 1] = x * out[:, 0]
    for n in range(1, dim - 1):
        out[:, n + 1] = (x * out[:, n] - np.sqrt(n) * out[:, n - 1]) / np.sqrt(n + 1.0)
    return out


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-9, psd_floor: float = -1e-9) -> None:
    """Raise if `rho` is not Hermitian, trace <= 1, and PSD within tolerance."""
    gap = np.max(np.abs(rho - rho.conj().T))
    if gap > herm_tol:
        raise ValueError(f"density matrix not Hermitian: max asymmetry {gap:.2e}")
    tr = np.trace(rho).real
    if tr > 1.0 + trace_tol:
        raise ValueError(f"density matrix trace {tr} exceeds 1")
    low = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if low < psd_floor:
        raise ValueError(f"density matrix has eigenvalue {low:.2e} below floor")
