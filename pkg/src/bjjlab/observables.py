"""Phase-coherence and relative-number observables.

The coherence operators are normalised by the expectation
``K_S = <2 n1 n2 + n1 + n2>`` taken on the state under study. For mixed
states every raw moment is averaged first and the ratios are formed from the
averaged moments, so the ensemble ``K_S`` sits in the denominators.

States are real amplitude vectors over the Fock basis ``k = 0..N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

NORM_TOL = 1e-12


@dataclass(frozen=True)
class CoherenceStats:
    mean_cos: float
    mean_sin: float
    mean_cos2: float
    mean_sin2: float
    var_cos: float
    mean_cos_2phi: float
    mean_sin_2phi: float
    ks: float


@dataclass(frozen=True)
class NumberStats:
    mean_nr: float
    var_nr: float
    inv_s_squared: float

    @property
    def squeezing(self) -> float:
        """S = sqrt(N / var(N_r)); infinite for a Fock state."""
        return math.inf if self.inv_s_squared == 0 else 1.0 / math.sqrt(self.inv_s_squared)


def _as_states(states, n_total: int) -> np.ndarray:
    arr = np.asarray(states, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] != n_total + 1:
        raise ValueError(f"states need {n_total + 1} amplitudes, got {arr.shape[0]}")
    return np.ascontiguousarray(arr)


def _check_normalized(state: np.ndarray):
    norm2 = float(np.dot(state, state))
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalised (|c|^2 = {norm2!r})")


def moments(states, n_total: int) -> np.ndarray:
    """Raw moments per state, shape (m, 5): hop1, hop2, ks, <N_r>, <N_r^2>."""
    return _kernels.state_moments(_as_states(states, n_total), n_total)


def hop_moment_1(state, n_total: int) -> float:
    """<a2+ a1 + a2 a1+> for a real state."""
    _check_normalized(np.asarray(state, dtype=np.float64))
    return float(moments(state, n_total)[0, 0])


def hop_moment_2(state, n_total: int) -> float:
    """<(a2+ a1)^2> + <(a2 a1+)^2> for a real state."""
    _check_normalized(np.asarray(state, dtype=np.float64))
    return float(moments(state, n_total)[0, 1])


def ks_norm(state, n_total: int) -> float:
    """K_S = <2 n1 n2 + n1 + n2> (the bracket itself, not its root)."""
    _check_normalized(np.asarray(state, dtype=np.float64))
    return float(moments(state, n_total)[0, 2])


def _coherence_from_moments(hop1: float, hop2: float, ks: float) -> CoherenceStats:
    hop1, hop2, ks = float(hop1), float(hop2), float(ks)
    if not ks > 0:
        raise ValueError(f"K_S must be positive, got {ks!r}; state is corrupted")
    mean_cos = hop1 / math.sqrt(2.0 * ks)
    half_c2 = hop2 / (2.0 * ks)
    mean_cos2 = 0.5 + half_c2
    # (<X^2> - <X>^2) / (2 K_S) >= 0 exactly; only cancellation can push it below
    var_cos = mean_cos2 - mean_cos * mean_cos
    if var_cos < 0.0 and var_cos > -1e-12:
        var_cos = 0.0
    # real amplitudes: the sin channel expectations vanish identically
    return CoherenceStats(
        mean_cos=mean_cos,
        mean_sin=0.0,
        mean_cos2=mean_cos2,
        mean_sin2=0.5 - half_c2,
        var_cos=var_cos,
        mean_cos_2phi=hop2 / ks,
        mean_sin_2phi=0.0,
        ks=ks,
    )


def _number_from_moments(nr1: float, nr2: float, n_total: int) -> NumberStats:
    nr1, nr2 = float(nr1), float(nr2)
    var = nr2 - nr1 * nr1
    # pure Fock states can round to a tiny negative variance
    if var < 0.0 and var > -1e-9 * max(1.0, nr2):
        var = 0.0
    return NumberStats(mean_nr=nr1, var_nr=var, inv_s_squared=var / n_total)


def coherence_stats(state, n_total: int) -> CoherenceStats:
    state = np.asarray(state, dtype=np.float64)
    _check_normalized(state)
    hop1, hop2, ks, _, _ = moments(state, n_total)[0]
    return _coherence_from_moments(hop1, hop2, ks)


def number_stats(state, n_total: int) -> NumberStats:
    state = np.asarray(state, dtype=np.float64)
    _check_normalized(state)
    _, _, _, nr1, nr2 = moments(state, n_total)[0]
    return _number_from_moments(nr1, nr2, n_total)


def _ensemble_moments(weights, states, n_total: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    states = _as_states(states, n_total)
    if w.size != states.shape[1]:
        raise ValueError(f"{w.size} weights for {states.shape[1]} states")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = math.fsum(w)
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"weights sum to {total!r}, not 1")
    keep = np.flatnonzero(w)
    per_state = _kernels.state_moments(np.ascontiguousarray(states[:, keep]), n_total)
    return np.array([math.fsum(w[keep] * per_state[:, q]) for q in range(per_state.shape[1])])


def ensemble_coherence_stats(weights, states, n_total: int) -> CoherenceStats:
    """Coherence statistics of the mixture sum_i w_i |psi_i><psi_i|.

    ``states`` holds one orthonormal state per column.
    """
    hop1, hop2, ks, _, _ = _ensemble_moments(weights, states, n_total)
    return _coherence_from_moments(hop1, hop2, ks)


def ensemble_number_stats(weights, states, n_total: int) -> NumberStats:
    _, _, _, nr1, nr2 = _ensemble_moments(weights, states, n_total)
    return _number_from_moments(nr1, nr2, n_total)


def binomial_state(n_total: int) -> np.ndarray:
    """c_k = sqrt(C(N, k) / 2^N), the E_C = 0, delta = 0 ground state."""
    k = np.arange(n_total + 1)
    log_c = 0.5 * (
        math.lgamma(n_total + 1)
        - np.array([math.lgamma(i + 1) + math.lgamma(n_total - i + 1) for i in k])
        - n_total * math.log(2.0)
    )
    c = np.exp(log_c)
    return c / np.linalg.norm(c)


def fock_state(n_total: int, k: int) -> np.ndarray:
    c = np.zeros(n_total + 1)
    c[k] = 1.0
    return c
