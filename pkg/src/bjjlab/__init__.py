"""Exact diagonalization of the two-mode Bose-Josephson junction."""

__version__ = "0.1.0"

from ._jit import USE_NUMBA
from .eigensolve import ConvergenceError, SpectralDecomposition, diagonalize, ground_state
from .model import JunctionParams, TridiagonalHamiltonian, build_hamiltonian
from .observables import CoherenceStats, NumberStats, coherence_stats, number_stats
from .thermal import thermal_coherence, thermal_ensemble, thermal_number

__all__ = [
    "USE_NUMBA",
    "ConvergenceError",
    "SpectralDecomposition",
    "diagonalize",
    "ground_state",
    "JunctionParams",
    "TridiagonalHamiltonian",
    "build_hamiltonian",
    "CoherenceStats",
    "NumberStats",
    "coherence_stats",
    "number_stats",
    "thermal_coherence",
    "thermal_ensemble",
    "thermal_number",
]
