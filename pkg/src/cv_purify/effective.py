"""Closed-form effective system of teleportation with Gaussian post-selection.

Given the physical channel (T, eps), the EPR parameter chi, the
post-selection gain g in (0, 1] and the classical displacement gain phi, the
whole protocol is equivalent to a noiseless amplifier ``nla_gain^n`` followed
by a Gaussian channel of transmission ``eta`` and excess noise ``delta``,
scaled by a constant ``prefactor``.  This module evaluates that equivalence
and the special unit-transmission regime reached at the optimal gain.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .gaussian import ChannelParams

__all__ = [
    "TeleporterConfig",
    "EffectiveChannelParams",
    "UnphysicalRegimeError",
    "InfeasibleGainError",
    "DegenerateGainWarning",
    "conditioning_params",
    "effective_params",
    "optimal_gain",
    "delta_at_optimal_gain",
    "delta_without_postselection",
    "nla_gain_at_optimal_gain",
    "success_probability",
    "solve_unit_transmission_gain",
]


class UnphysicalRegimeError(ValueError):
    """The requested (channel, teleporter) point has no Gaussian effective system."""


class InfeasibleGainError(ValueError):
    """No post-selection gain in (0, 1] reaches the requested regime."""


class DegenerateGainWarning(UserWarning):
    """Degenerate change of variables (classical gain equals the conditional
    displacement gain at g = 1); the closed forms remain exact there."""


@dataclass(frozen=True)
class TeleporterConfig:
    """Teleporter settings: EPR parameter, post-selection gain, classical gain.

    The post-selection gain is restricted to (0, 1]; emulating gains above 1
    needs a cut-off and is out of scope.
    """

    chi: float
    ps_gain: float
    classical_gain: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.chi < 1.0:
            raise ValueError(f"EPR parameter must be in [0, 1), got {self.chi}")
        if not 0.0 < self.ps_gain <= 1.0:
            raise ValueError(f"post-selection gain must be in (0, 1], got {self.ps_gain}")
        if not np.isfinite(self.classical_gain):
            raise ValueError("classical gain must be finite")


@dataclass(frozen=True)
class EffectiveChannelParams:
    """Derived parameters of the equivalent amplifier + channel picture.

    ``transmission`` (eta) and ``excess_noise`` (delta) describe the
    effective Gaussian channel, preceded by a noiseless amplifier of gain
    ``nla_gain`` and scaled by ``prefactor``; a coherent amplitude ``alpha``
    leaves with mean amplitude ``amplitude_gain * alpha``.  The thermal
    parameters and gains of the intermediate conditional states are kept as
    auxiliaries.
    """

    transmission: float          # eta
    total_input_noise: float     # chi_ch = |1 - eta|/eta + delta
    excess_noise: float          # delta
    nla_gain: float              # g_eff
    amplitude_gain: float        # G, output mean amplitude per unit input
    prefactor: float             # global constant of the unnormalized output
    gain_exponent: float         # g_eff^2 - 1, coefficient of |alpha|^2
    cond_thermal_param: float    # lambda_B, conditional state of Bob's mode
    tele_thermal_param: float    # lambda_tele, noise added by the feedback
    out_thermal_param: float     # lambda_out, total output thermal parameter
    cond_disp_gain: float        # chi_star
    alice_thermal_param: float   # chi_bar
    channel: ChannelParams
    config: TeleporterConfig

    @property
    def output_variance(self) -> float:
        lo2 = self.out_thermal_param ** 2
        return (1.0 + lo2) / (1.0 - lo2)


def conditioning_params(channel: ChannelParams, chi: float):
    """Closed forms (lambda_B, chi_star, chi_bar) of the conditional state.

    These depend only on the physical channel and the EPR parameter, not on
    the post-selection.  For a perfect channel all three reduce to
    (0, chi, chi).
    """
    if not 0.0 <= chi < 1.0:
        raise ValueError(f"EPR parameter must be in [0, 1), got {chi}")
    t = channel.transmission
    eps = channel.excess_noise
    lam_b = chi * np.sqrt((t * (eps - 2.0) + 2.0) / (t * eps + 2.0))
    chi_star = 2.0 * np.sqrt(t) * chi / (
        2.0 + t * eps - chi ** 2 * (2.0 + (eps - 2.0) * t))
    chi_bar = np.sqrt(t * (chi ** 2 * (eps - 2.0) - eps) /
                      (chi ** 2 * (t * (eps - 2.0) + 2.0) - t * eps - 2.0))
    return float(lam_b), float(chi_star), float(chi_bar)


def effective_params(channel: ChannelParams, config: TeleporterConfig) -> EffectiveChannelParams:
    """Evaluate the effective system for one (channel, teleporter) point.

    Raises
    ------
    UnphysicalRegimeError
        If ``g^2 * chi_bar^2 >= 1`` or the feedback thermal parameter leaves
        [0, 1), i.e. the output is not a displaced thermal state.
    """
    g = config.ps_gain
    phi = config.classical_gain
    lam_b, chi_star, chi_bar = conditioning_params(channel, config.chi)

    g2 = g * g
    cb2 = chi_bar * chi_bar
    if g2 * cb2 >= 1.0:
        raise UnphysicalRegimeError(
            f"g^2 * chi_bar^2 = {g2 * cb2:.6f} >= 1; no effective channel")
    if phi == chi_star and g == 1.0:
        warnings.warn("classical gain equals the conditional displacement gain "
                      "at unit post-selection gain; feedback noise vanishes "
                      "exactly", DegenerateGainWarning, stacklevel=2)

    # removable singularity at phi = chi_star: the feedback adds no noise
    lt2_den = 1.0 + g2 * (phi - chi_bar - chi_star) * (phi + chi_bar - chi_star)
    lam_tele2 = g2 * (phi - chi_star) ** 2 / lt2_den
    if not 0.0 <= lam_tele2 < 1.0:
        raise UnphysicalRegimeError(
            f"feedback thermal parameter squared = {lam_tele2:.6f} outside [0, 1)")

    amp_gain = (chi_star - g2 * (phi * (cb2 - 1.0) + chi_star)) / (1.0 - g2 * cb2)
    nla_gain = np.sqrt((cb2 - g2 * (2.0 * cb2 - 1.0)) / (1.0 - g2 * cb2))
    eta = amp_gain ** 2 / nla_gain ** 2

    lb2 = lam_b * lam_b
    lam_out2 = (lb2 + lam_tele2 - 2.0 * lb2 * lam_tele2) / (1.0 - lb2 * lam_tele2)
    v_out = (1.0 + lam_out2) / (1.0 - lam_out2)
    chi_ch = v_out / eta - 1.0
    delta = chi_ch - abs(1.0 - eta) / eta
    prefactor = g2 * (1.0 - cb2) / (1.0 - g2 * cb2)

    return EffectiveChannelParams(
        transmission=float(eta),
        total_input_noise=float(chi_ch),
        excess_noise=float(delta),
        nla_gain=float(nla_gain),
        amplitude_gain=float(amp_gain),
        prefactor=float(prefactor),
        gain_exponent=float(nla_gain ** 2 - 1.0),
        cond_thermal_param=lam_b,
        tele_thermal_param=float(np.sqrt(lam_tele2)),
        out_thermal_param=float(np.sqrt(lam_out2)),
        cond_disp_gain=chi_star,
        alice_thermal_param=chi_bar,
        channel=channel,
        config=config,
    )


def optimal_gain(transmission: float, chi: float) -> float:
    """Post-selection gain that makes the effective transmission exactly 1.

    Valid for a pure-loss channel (eps = 0) with classical gain 1.

    Raises
    ------
    InfeasibleGainError
        If the closed form has no root with g^2 in (0, 1] at this (T, chi).
    """
    if not 0.0 < transmission < 1.0:
        raise ValueError(f"transmission must be in (0, 1), got {transmission}")
    if not 0.0 < chi < 1.0:
        raise ValueError(f"EPR parameter must be in (0, 1), got {chi}")
    st = np.sqrt(transmission)
    num = (1.0 - transmission) * transmission * chi ** 4
    den = (1.0 - 2.0 * st * chi - 2.0 * (1.0 - transmission) * chi ** 2
           + 2.0 * st * chi ** 3
           + (1.0 - transmission - transmission ** 2) * chi ** 4)
    if den <= 0.0:
        raise InfeasibleGainError(
            f"unit transmission unreachable at T={transmission}, chi={chi}: "
            f"gain denominator {den:.6f} <= 0")
    g2 = num / den
    if not 0.0 < g2 <= 1.0:
        raise InfeasibleGainError(
            f"unit transmission unreachable at T={transmission}, chi={chi}: "
            f"gain squared {g2:.6f} outside (0, 1]")
    return float(np.sqrt(g2))


def delta_at_optimal_gain(transmission: float, chi: float) -> float:
    """Effective excess noise 2*(1-T)*chi^2/(1-chi^2) in the eta = 1 regime."""
    _check_unit_interval(transmission, chi)
    return 2.0 * (1.0 - transmission) * chi ** 2 / (1.0 - chi ** 2)


def delta_without_postselection(transmission: float, chi: float) -> float:
    """Effective excess noise 2*(1-sqrt(T)*chi)^2/(1-chi^2) at g = 1.

    Tends to 2 shot-noise units as chi -> 0 and vanishes only for a perfect
    channel with chi -> 1.
    """
    _check_unit_interval(transmission, chi)
    return 2.0 * (1.0 - np.sqrt(transmission) * chi) ** 2 / (1.0 - chi ** 2)


def nla_gain_at_optimal_gain(transmission: float, chi: float) -> float:
    """Effective amplifier gain sqrt(T)*chi*(1-sqrt(T)*chi) / (1-sqrt(T)*chi+(T-1)*chi^2)."""
    _check_unit_interval(transmission, chi)
    st_chi = np.sqrt(transmission) * chi
    return st_chi * (1.0 - st_chi) / (1.0 - st_chi + (transmission - 1.0) * chi ** 2)


def _check_unit_interval(transmission, chi):
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must be in [0, 1], got {transmission}")
    if not 0.0 <= chi < 1.0:
        raise ValueError(f"EPR parameter must be in [0, 1), got {chi}")


def success_probability(eff: EffectiveChannelParams, populations) -> float:
    """Post-selection success probability for a state with given Fock populations.

    The effective channel is trace preserving, so the probability is the
    trace of the unnormalized output,
    ``prefactor * sum_n nla_gain^(2n) * populations[n]``.

    Parameters
    ----------
    eff : EffectiveChannelParams
    populations : array_like
        Diagonal of the input density matrix in the Fock basis; must be
        nonnegative and sum to 1 up to a truncation loss of 1e-6.
    """
    p = np.asarray(populations, dtype=float)
    if p.min() < -1e-12:
        raise ValueError(f"negative Fock population: {p.min()}")
    missing = abs(1.0 - p.sum())
    if missing > 1e-6:
        raise ValueError(f"populations lose {missing:.2e} of unit mass to truncation")
    weights = eff.nla_gain ** (2.0 * np.arange(len(p)))
    return float(eff.prefactor * np.dot(weights, p))


def solve_unit_transmission_gain(channel: ChannelParams, chi: float,
                                 classical_gain: float = 1.0) -> float:
    """Numerically solve for the post-selection gain giving eta = 1.

    Unlike :func:`optimal_gain` this works for noisy channels and arbitrary
    classical gain, but it is a root find on the general eta expression, not
    a closed form.
    """
    def eta_minus_one(g):
        cfg = TeleporterConfig(chi=chi, ps_gain=g, classical_gain=classical_gain)
        return effective_params(channel, cfg).transmission - 1.0

    gs = np.linspace(1e-6, 1.0, 201)
    vals = []
    for g in gs:
        try:
            vals.append(eta_minus_one(g))
        except UnphysicalRegimeError:
            vals.append(np.nan)
    vals = np.asarray(vals)
    ok = np.isfinite(vals)
    sign_change = np.nonzero((vals[:-1] * vals[1:] < 0) & ok[:-1] & ok[1:])[0]
    if len(sign_change) == 0:
        raise InfeasibleGainError(
            f"no gain in (0, 1] gives unit transmission at T={channel.transmission}, "
            f"eps={channel.excess_noise}, chi={chi}, phi={classical_gain}")
    i = sign_change[0]
    return float(brentq(eta_minus_one, gs[i], gs[i + 1], xtol=1e-14))
