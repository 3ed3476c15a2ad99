"""Dark-state classification for driven dissipative multi-level systems."""

from .classify import (DarkClassification, DegenerateGroup, classify_system,
                       dark_subspaces, degenerate_groups, rabi_condition_residual,
                       verify_dark)
from .dynamics import (ConservedQuantitySet, TrajectoryResult, asymptotic_state,
                       conserved_quantities, excited_population, parameter_scan,
                       propagate, purity, steady_state_basis)
from .liouville import (Superoperator, build_jump, build_lindblad, build_nonhermitian,
                        gamma_operator)
from .model import (DecayChannel, LaserCoupling, Level, LevelSystem, coupling_matrix,
                    load_system, save_system, validate_system)
from .presets import PRESETS, get_preset
from .rwa import RotatingFrame, RwaHamiltonian, build_hamiltonian, count_cycles, solve_frame

__version__ = "0.1.0"
