"""Canonical-ensemble averages and spectrum diagnostics.

Temperatures are k_B T in the Hamiltonian's energy units; ``beta = 1/(k_B T)``.
``beta = math.inf`` is the ground state, with equal weights spread over a
degenerate ground multiplet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolve import DEGENERACY_RTOL, SpectralDecomposition
from .model import JunctionParams
from .observables import (
    CoherenceStats,
    NumberStats,
    ensemble_coherence_stats,
    ensemble_number_stats,
)

DEFAULT_DEGENERACY_TOL = 1e-6


@dataclass(frozen=True)
class ThermalEnsemble:
    beta: float
    weights: np.ndarray
    spectrum: SpectralDecomposition
    ground_split: int = 1  # levels sharing the weight at beta = inf

    @property
    def temperature(self) -> float:
        return math.inf if self.beta == 0 else 1.0 / self.beta


@dataclass(frozen=True)
class SpectrumDiagnostics:
    mean_spacing: float
    top_gap: float
    degenerate_top: bool


def boltzmann_weights(energies, beta: float) -> np.ndarray:
    """exp(-beta (E_i - E_0)) normalised; energies must be ascending."""
    energies = np.asarray(energies, dtype=np.float64)
    if math.isnan(beta) or beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if beta == 0:
        return np.full(energies.size, 1.0 / energies.size)
    x = np.exp(-beta * (energies - energies[0]))
    return x / math.fsum(x)


def thermal_ensemble(spectrum: SpectralDecomposition, beta: float) -> ThermalEnsemble:
    if math.isinf(beta) and beta > 0:
        mult = spectrum.ground_multiplicity(DEGENERACY_RTOL)
        weights = np.zeros(spectrum.dim)
        weights[:mult] = 1.0 / mult
        return ThermalEnsemble(beta, weights, spectrum, ground_split=mult)
    return ThermalEnsemble(beta, boltzmann_weights(spectrum.eigenvalues, beta), spectrum)


def thermal_coherence(params: JunctionParams, spectrum: SpectralDecomposition, beta: float) -> CoherenceStats:
    ens = thermal_ensemble(spectrum, beta)
    return ensemble_coherence_stats(ens.weights, spectrum.eigenvectors, params.n_total)


def thermal_number(params: JunctionParams, spectrum: SpectralDecomposition, beta: float) -> NumberStats:
    ens = thermal_ensemble(spectrum, beta)
    return ensemble_number_stats(ens.weights, spectrum.eigenvectors, params.n_total)


def spectrum_diagnostics(spectrum: SpectralDecomposition, degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> SpectrumDiagnostics:
    """Average level spacing and the gap between the two highest levels.

    The top pair counts as degenerate when its gap is below
    ``degeneracy_tol`` times the mean spacing.
    """
    e = spectrum.eigenvalues
    if e.size < 2:
        raise ValueError("spectrum diagnostics need at least two levels")
    mean_spacing = float(e[-1] - e[0]) / (e.size - 1)
    top_gap = float(e[-1] - e[-2])
    return SpectrumDiagnostics(mean_spacing, top_gap, top_gap < degeneracy_tol * mean_spacing)
