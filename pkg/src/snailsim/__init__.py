"""snailsim: simulator for a flux-modulated SNAIL-terminated resonator.

Derives the quantized Hamiltonian of the device from microscopic circuit
parameters, integrates its lossy time-dependent dynamics to prepare squeezed
and cubic phase states, and numerically checks the continuous-variable
universal-gate-set composition laws.
"""

__version__ = "0.1.0"

from .analysis import (FidelityReport, WignerGrid, fidelity,
                       ideal_cubic_phase_state, ideal_squeezed_state,
                       negativity_volume, wigner)
from .circuit import (CouplingSet, ModeSolution, ResonatorParams,
                      compute_couplings, couplings_report, derive_couplings,
                      effective_cubic_drive, mode_normalization,
                      solve_eigenmode)
from .config import (DEFAULTS, ExperimentConfig, default_config,
                     parse_config, validate_config)
from .errors import (BudgetExceeded, DimensionMismatch, IntegratorFailure,
                     InvalidStiffness, NoMinimumFound, NoRootInInterval,
                     SchemaError, SnailSimError, TruncationLeak, UnitError,
                     UnsupportedModeCount)
from .fock import (IntegrationResult, LindbladConfig, QuantumState,
                   TimeDependentHamiltonian, build_snail_hamiltonian,
                   displace, expectation, integrate, ladder_ops, rotate,
                   squeezing_from_variance, trajectory_to_csv, variance)
from .protocols import (CubicProtocol, ProtocolResult, SqueezeProtocol,
                        detuning_correction, effective_displacement,
                        prepare_cubic_phase_state, run_cubic_gate,
                        run_squeeze)
from .snail import (SnailParams, TaylorCoeffs, ac_coeff_amplitudes,
                    expand_potential, find_minimum, kerr_free_flux,
                    potential_eval, static_coeffs)
from .universality import (GateSequence, GateSpec, commutator_compose,
                           commutator_exact, compose_defect, gate_unitary,
                           low_level_defect, synthesize_polynomial,
                           t_gate_coefficients, t_gate_target)
