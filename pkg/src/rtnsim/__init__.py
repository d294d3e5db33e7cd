"""Two singlet-triplet qubits under random telegraph noise.

Monte-Carlo averaging of exactly propagated unitary trajectories, with the
Wootters concurrence of the averaged state as the figure of merit.
"""
from ._backend import DEFAULT as BACKEND
from .entanglement import concurrence, ddse, sorted_lambdas, time_reversed
from .errors import (ConfigError, ContractError, DomainError, NumericalDegeneracyError,
                     ParameterError, RtnSimError)
from .montecarlo import EnsembleConfig, EnsembleResult, convergence_report, run_ensemble
from .noise import (InitialSignMode, RtnParams, RtnTrajectory, empirical_autocorrelation,
                    generate_trajectory, stream, value_at)
from .protocol import (Protocol, PulsePhase, SweepRow, max_concurrence, shulman_protocol,
                       sweep_prep, sweep_R)
from .qdyn import (ControlParams, build_noise_hamiltonian, build_system_hamiltonian,
                   evolve_segment, j0_from_mhz, kron, pauli, propagate_trajectory)
from .spectral import PowerLawFit, Spectrum, average_psd, fit_power_law, lorentzian_psd

__version__ = "0.1.0"
