"""Herman-Kluk wavefunction propagation with interchangeable Monte Carlo
phase-space sampling strategies, plus quantum references and convergence
analysis tools."""

__version__ = "0.1.0"

from .grids import GridWavefunction, SpatialGrid
from .wavepacket import GaussianWavepacket, evaluate_gaussian, gaussian_overlap
from .sampling import SamplingScheme
from .potentials import (CustomPotential, HarmonicPotential, MorsePotential,
                         MorseSpec, hamiltonian, morse_levels)
from .dynamics import Trajectory, propagate, step
from .prefactor import (CausticError, HKPrefactorState, hk_prefactor,
                        prefactor_bound_check, prefactor_determinant)
from .ensemble import HKEnsemble, synthesize_on_grid
from .reference import (HarmonicExactState, harmonic_action, harmonic_classical,
                        harmonic_exact, harmonic_prefactor, harmonic_stability,
                        harmonic_width_step, split_operator_propagate)
from .analysis import (ConvergenceFit, TrajectoryCountQuery,
                       chebyshev_min_trajectories, clt_trajectory_estimate,
                       coherent_initial_error, empirical_rmse, erfc_inv,
                       fit_power_law, gram_initial_error, l2_error,
                       spectral_peaks, spectrum, variance_harmonic_sqrt_husimi,
                       variance_initial_sqrt_husimi, variance_rho_a_initial)

__all__ = [
    "GridWavefunction", "SpatialGrid",
    "GaussianWavepacket", "evaluate_gaussian", "gaussian_overlap",
    "SamplingScheme",
    "CustomPotential", "HarmonicPotential", "MorsePotential", "MorseSpec",
    "hamiltonian", "morse_levels",
    "Trajectory", "propagate", "step",
    "CausticError", "HKPrefactorState", "hk_prefactor",
    "prefactor_bound_check", "prefactor_determinant",
    "HKEnsemble", "synthesize_on_grid",
    "HarmonicExactState", "harmonic_action", "harmonic_classical",
    "harmonic_exact", "harmonic_prefactor", "harmonic_stability",
    "harmonic_width_step", "split_operator_propagate",
    "ConvergenceFit", "TrajectoryCountQuery",
    "chebyshev_min_trajectories", "clt_trajectory_estimate",
    "coherent_initial_error", "empirical_rmse", "erfc_inv",
    "fit_power_law", "gram_initial_error", "l2_error",
    "spectral_peaks", "spectrum", "variance_harmonic_sqrt_husimi",
    "variance_initial_sqrt_husimi", "variance_rho_a_initial",
]
