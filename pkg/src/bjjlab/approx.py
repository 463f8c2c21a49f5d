"""Approximation schemes checked against exact diagonalization.

* a variational Gaussian profile for the Fock amplitudes of symmetric junctions,
* a two-level superposition of adjacent zero-tunneling states near a
  single-atom resonance,
* classical Boltzmann averages over the mean-field pendulum Hamiltonian
  ``H_cl(n, phi) = E_C n^2 / 2 + delta n - E_J sqrt(1 - (2n/N)^2) cos(phi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .eigensolve import ConvergenceError
from .model import JunctionParams, build_hamiltonian, fock_index, twice_n, zero_tunneling_energy

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class BracketError(RuntimeError):
    """The variational landscape is flat or its minimum sits on the bracket edge."""


@dataclass(frozen=True)
class GaussianAnsatzResult:
    sigma: float
    energy: float
    state: np.ndarray


@dataclass(frozen=True)
class TwoLevelResult:
    alpha1: float
    alpha2: float
    energy: float
    state: np.ndarray
    lower_n: float  # quasi-angular momentum of |L1>; |L2> has lower_n + 1
    h11: float
    h22: float
    h12: float


@dataclass(frozen=True)
class ClassicalEstimate:
    mean_cos: float
    mean_cos2: float
    var_cos: float
    partition: float
    log_partition: float
    grid: tuple[int, int]


# -- Gaussian ansatz ---------------------------------------------------------


def gaussian_amplitudes(n_total: int, sigma: float, center: float | None = None) -> np.ndarray:
    """c_k proportional to exp(-(k - k0)^2 / (4 sigma^2)), normalised."""
    k0 = n_total / 2 if center is None else center
    k = np.arange(n_total + 1, dtype=np.float64)
    log_c = -((k - k0) ** 2) / (4.0 * sigma * sigma)
    c = np.exp(log_c - log_c.max())
    return c / np.linalg.norm(c)


def golden_section_minimize(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 500):
    """Minimise a unimodal f on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def gaussian_ansatz(params: JunctionParams, sigma_lo: float = 1e-2, sigma_hi: float | None = None,
                    tol: float = 1e-10) -> GaussianAnsatzResult:
    """Best Gaussian-profile state centred at k0 = N/2, by golden-section on log(sigma)."""
    if params.asymmetry_delta != 0:
        raise ValueError("the Gaussian ansatz is centred at N/2 and needs delta = 0")
    n = params.n_total
    h = build_hamiltonian(params)
    hi = float(n) if sigma_hi is None else sigma_hi

    def energy(log_sigma):
        return h.expectation(gaussian_amplitudes(n, math.exp(log_sigma)))

    log_lo, log_hi = math.log(sigma_lo), math.log(hi)
    probes = np.linspace(log_lo, log_hi, 9)
    values = np.array([energy(x) for x in probes])
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.ptp(values) <= 1e-13 * scale:
        raise BracketError(f"energy is flat in sigma on [{sigma_lo}, {hi}] for N={n}")
    log_sigma, e_min = golden_section_minimize(energy, log_lo, log_hi, tol=tol)
    edge = 1e3 * tol
    if log_sigma - log_lo < edge or log_hi - log_sigma < edge:
        raise BracketError(
            f"optimal sigma {math.exp(log_sigma):.3g} sits on the bracket edge [{sigma_lo}, {hi}]"
        )
    sigma = math.exp(log_sigma)
    return GaussianAnsatzResult(sigma=sigma, energy=e_min, state=gaussian_amplitudes(n, sigma))


# -- two-level perturbation --------------------------------------------------


def lowest_pair(params: JunctionParams) -> float:
    """Lower quasi-angular momentum n of the two lowest zero-tunneling levels.

    Levels are sorted by E*(n), ties broken toward smaller |n|, then smaller n.
    Raises if the two lowest levels are not adjacent (n, n + 1).
    """
    n_total = params.n_total
    if n_total < 1:
        raise ValueError("need at least one atom")
    moms = [two_n / 2 for two_n in range(-n_total, n_total + 1, 2)]
    ranked = sorted(moms, key=lambda m: (zero_tunneling_energy(params, m), abs(m), m))
    a, b = sorted(ranked[:2])
    if b - a != 1:
        raise ValueError(f"two lowest zero-tunneling levels n={a}, n={b} are not adjacent")
    return a


def two_level_ground(params: JunctionParams, n=None) -> TwoLevelResult:
    """Lower eigenpair of H restricted to span{|n>, |n+1>}.

    ``n`` defaults to ``lowest_pair(params)``. |L1> is momentum n and |L2> is
    n + 1; the matrix elements come straight from the Fock-basis bands.
    """
    if n is None:
        n = lowest_pair(params)
    n_total = params.n_total
    twice_n(n_total, n)
    twice_n(n_total, n + 1)
    k1 = fock_index(n_total, n)
    k2 = fock_index(n_total, n + 1)  # = k1 - 1
    h = build_hamiltonian(params)
    h11 = float(h.diag[k1])
    h22 = float(h.diag[k2])
    h12 = float(h.offdiag[k2])
    mean = 0.5 * (h11 + h22)
    half = 0.5 * (h11 - h22)
    root = math.hypot(half, h12)
    energy = mean - root
    # eigenvector of [[h11, h12], [h12, h22]] at the lower root, written to stay
    # well conditioned on both sides of the resonance
    if half >= 0:
        a1, a2 = h12, energy - h11
        if a1 == 0 and a2 == 0:
            a1, a2 = 0.0, 1.0
    else:
        a1, a2 = energy - h22, h12
        if a1 == 0 and a2 == 0:
            a1, a2 = 1.0, 0.0
    norm = math.hypot(a1, a2)
    a1, a2 = a1 / norm, a2 / norm
    if abs(a1) >= abs(a2):
        sign = 1.0 if a1 >= 0 else -1.0
    else:
        sign = 1.0 if a2 >= 0 else -1.0
    a1, a2 = sign * a1, sign * a2
    state = np.zeros(n_total + 1)
    state[k1] = a1
    state[k2] = a2
    return TwoLevelResult(a1, a2, energy, state, float(n), h11, h22, h12)


# -- classical Boltzmann estimate --------------------------------------------

CLASSICAL_TOL = 1e-6
CLASSICAL_MAX_POINTS = 2**14


def classical_moments(params: JunctionParams, beta: float, n_points: int, phi_points: int):
    """Trapezoid sums on a fixed grid: (mean_cos, mean_cos2, log_partition)."""
    half = params.n_total / 2
    n_grid = np.linspace(-half, half, n_points)
    phi = -math.pi + 2.0 * math.pi * np.arange(phi_points) / phi_points
    cos_phi = np.cos(phi)
    s0, s1, s2, shift = _kernels.classical_sums(
        n_grid, cos_phi, float(beta), float(params.charging_ec), float(params.asymmetry_delta),
        float(params.junction_energy()), float(params.n_total),
    )
    cell = (n_grid[1] - n_grid[0]) * (2.0 * math.pi / phi_points)
    log_z = math.log(s0 * cell) + shift
    return s1 / s0, s2 / s0, log_z


def classical_boltzmann(params: JunctionParams, beta: float, tol: float = CLASSICAL_TOL,
                        start_points: int = 64, max_points: int = CLASSICAL_MAX_POINTS) -> ClassicalEstimate:
    """Phase-space averages of cos(phi) and cos^2(phi) under exp(-beta H_cl).

    Flat measure dn dphi on n in [-N/2, N/2], phi in [-pi, pi). The phi grid is
    doubled until var_cos moves by less than tol/4, then the n grid is doubled
    until var_cos moves by less than tol; the phi resolution is re-checked at
    every n level. Raises ``ConvergenceError`` past ``max_points`` on an axis.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if math.isinf(beta):
        raise ValueError("classical estimate needs finite beta")
    if params.n_total < 2:
        raise ValueError("classical estimate needs N >= 2")

    def var_cos(nn, mp):
        c1, c2, log_z = classical_moments(params, beta, nn, mp)
        return c2 - c1 * c1, c1, c2, log_z

    n_pts, phi_pts = start_points + 1, start_points
    current = var_cos(n_pts, phi_pts)

    def refine_phi():
        nonlocal phi_pts, current
        changed = False
        while True:
            if 2 * phi_pts > max_points:
                raise ConvergenceError(f"phi grid exceeded {max_points} points")
            finer = var_cos(n_pts, 2 * phi_pts)
            if abs(finer[0] - current[0]) < 0.25 * tol:
                return changed
            phi_pts *= 2
            current = finer
            changed = True

    refine_phi()
    while True:
        if 2 * (n_pts - 1) > max_points:
            raise ConvergenceError(f"n grid exceeded {max_points} points")
        n_pts = 2 * (n_pts - 1) + 1
        finer = var_cos(n_pts, phi_pts)
        delta_n = abs(finer[0] - current[0])
        current = finer
        if refine_phi():
            continue
        if delta_n < tol:
            break
    var, c1, c2, log_z = current
    partition = math.exp(log_z) if log_z < 700 else math.inf
    return ClassicalEstimate(
        mean_cos=c1, mean_cos2=c2, var_cos=max(var, 0.0),
        partition=partition, log_partition=log_z, grid=(n_pts, phi_pts),
    )
