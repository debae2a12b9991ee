"""Continuous-variable teleportation with Gaussian post-selection.

Closed-form effective channel of the protocol, truncated-Fock-space
brute-force oracles that verify every closed form, and the dual-rail
Bell-state distillation figures (CHSH and concurrence).

All quadratures are in shot-noise units: X = a + a^dag, P = i(a^dag - a),
vacuum variance 1, <X> + i<P> = 2<a>.
"""

from .gaussian import (ChannelParams, ConditionalState, TwoModeGaussianState,
                       alice_reduced_norm, conditional_after_heterodyne,
                       epr_after_channel, epr_variance, symplectic_form)
from .effective import (DegenerateGainWarning, EffectiveChannelParams,
                        InfeasibleGainError, TeleporterConfig,
                        UnphysicalRegimeError, conditioning_params,
                        delta_at_optimal_gain, delta_without_postselection,
                        effective_params, nla_gain_at_optimal_gain,
                        optimal_gain, solve_unit_transmission_gain,
                        success_probability)
from .fock import (TruncationWarning, annihilation_operator, beamsplitter_unitary,
                   check_density_matrix, coherent_state, displaced_thermal,
                   displacement_matrices, displacement_matrix, fock_state,
                   nla_operator, thermal_populations, thermal_state,
                   x_quadrature_wavefunctions)
from .grids import (PhaseSpaceGrid, gaussian_probe_error, gaussian_tail_radius,
                    square_grid)
from .channels import (apply_displacement_noise, apply_kraus,
                       displacement_noise_superop, loss_ancilla_param,
                       thermal_loss_kraus)
from .oracle import (DEFAULT_DIM, apply_effective_system, epr_pair_density,
                     sigma_ps_closed_form, sigma_ps_numeric,
                     teleport_arbitrary_state)
from .bell import (BellTestResult, chsh_loss, chsh_operator, chsh_tele,
                   concurrence_tele, loss_transmission_threshold,
                   noisy_bell_oracle, tele_noise_threshold,
                   wootters_concurrence)

__version__ = "0.1.0"
