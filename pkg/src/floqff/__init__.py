"""Floquet-engineered fast-forward state preparation for driven qubits.

Simulation library for avoided-crossing sweep protocols on a two-level
system (bare Landau-Zener, counter-diabatic, fast-forward, and
Floquet-engineered drives), band-limited dephasing noise ensembles, and
the general N-level variational construction of periodic fast-forward
drives.  The `floqff` command line runs single simulations, parameter
scans, and the built-in figure recipes.
"""

__version__ = "0.1.0"

from .errors import (AccuracyError, ConfigError, ContractViolationError,
                     DegeneracyError, DomainError, FitError, FloqffError,
                     GridError, NumericalError, SingularityError, UsageError)
from .evolve import (MINUS_X, PLUS_X, EvolutionResult, StepPolicy, evolve,
                     fidelity, final_fidelity, ground_state, strobe_compare)
from .noise import (DetuningSpec, EnsembleResult, NoiseRealization, NoiseSpec,
                    RamseyResult, fit_decay_envelope, noisy_ensemble,
                    ramsey_t2star, sample_detuning, sample_noise,
                    spectral_profile)
from .numerics import PauliVector, bessel_j, bessel_j1_zeros, herm_exp, pauli_exp, period_average
from .protocols import (ControlFields, ProtocolParams, ValidationReport,
                        cd_fields, fe_counter_amplitude, fe_effective_gap,
                        fe_fields, ff_fields, lab_frame_fields, lz_fields,
                        rotating_frame_map, validate_floquet_params)
from .schedules import SweepSchedule, eval_schedule
from .variational import (DriveAnsatz, ManyBodyProblem, SpectralData,
                          VariationalFit, agp_exact, evolve_dense,
                          fit_g_linear, interpolated_drive, load_problem,
                          magnus_h0, save_problem, spectral, variational_fit)

__all__ = [name for name in dir() if not name.startswith("_")]
