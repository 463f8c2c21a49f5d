"""Two-mode Bose-Hubbard model of a Bose-Josephson junction.

Basis states are indexed by ``k = n1`` (atoms in well 1), ascending, so the
relative number ``N_r = n2 - n1 = N - 2k`` decreases along the basis.
Quasi-angular momenta ``n = N_r / 2`` are half-integers for odd N and are
handled internally as the integer ``2n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real

import numpy as np


@dataclass(frozen=True)
class JunctionParams:
    """Particle number N, tunneling J, charging energy E_C and asymmetry delta.

    Energies are plain floats in any consistent unit.
    """

    n_total: int
    tunneling_j: float = 1.0
    charging_ec: float = 0.0
    asymmetry_delta: float = 0.0

    def __post_init__(self):
        if isinstance(self.n_total, bool) or int(self.n_total) != self.n_total:
            raise ValueError(f"n_total must be an integer, got {self.n_total!r}")
        object.__setattr__(self, "n_total", int(self.n_total))
        if self.n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {self.n_total}")
        if not self.charging_ec >= 0:
            raise ValueError(f"charging_ec must be >= 0, got {self.charging_ec}")
        for name in ("tunneling_j", "charging_ec", "asymmetry_delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def dim(self) -> int:
        return self.n_total + 1

    def junction_energy(self) -> float:
        """E_J = N * J."""
        return self.n_total * self.tunneling_j

    @classmethod
    def from_junction_energy(cls, n_total, junction_ej, charging_ec=0.0, asymmetry_delta=0.0):
        return cls(n_total, junction_ej / n_total, charging_ec, asymmetry_delta)

    def replace(self, **changes) -> "JunctionParams":
        fields = dict(
            n_total=self.n_total,
            tunneling_j=self.tunneling_j,
            charging_ec=self.charging_ec,
            asymmetry_delta=self.asymmetry_delta,
        )
        fields.update(changes)
        return JunctionParams(**fields)


def relative_number(n_total: int, k):
    """N_r = N - 2k for basis index k."""
    return n_total - 2 * k


def quasi_angular_momentum(n_total: int, k):
    """n = (N - 2k) / 2; half-integer for odd N."""
    return relative_number(n_total, k) / 2


def twice_n(n_total: int, n) -> int:
    """Validate a quasi-angular momentum and return 2n as an int."""
    if not isinstance(n, Real):
        raise TypeError(f"quasi-angular momentum must be real, got {n!r}")
    two_n = round(2 * n)
    if abs(2 * n - two_n) > 1e-9:
        raise ValueError(f"n must be an integer or half-integer, got {n}")
    if abs(two_n) > n_total:
        raise ValueError(f"|n| must be <= N/2 = {n_total / 2}, got {n}")
    if (two_n - n_total) % 2:
        raise ValueError(f"n = {n} is not reachable with N = {n_total} (2n and N must share parity)")
    return int(two_n)


def fock_index(n_total: int, n) -> int:
    """Basis index k holding quasi-angular momentum n."""
    return (n_total - twice_n(n_total, n)) // 2


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """The two stored bands of the symmetric Hamiltonian matrix.

    ``offdiag[k]`` couples basis states k and k+1.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=np.float64)
        offdiag = np.array(self.offdiag, dtype=np.float64).reshape(-1)
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("diag must be a non-empty 1-D sequence")
        if offdiag.size != diag.size - 1:
            raise ValueError(f"offdiag must have length {diag.size - 1}, got {offdiag.size}")
        diag.flags.writeable = False
        offdiag.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        h = np.diag(self.diag)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            h[idx, idx + 1] = self.offdiag
            h[idx + 1, idx] = self.offdiag
        return h

    def inf_norm(self) -> float:
        """Maximum absolute row sum."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        out = self.diag.reshape((-1,) + (1,) * (v.ndim - 1)) * v
        if self.dim > 1:
            off = self.offdiag.reshape((-1,) + (1,) * (v.ndim - 1))
            out[:-1] += off * v[1:]
            out[1:] += off * v[:-1]
        return out

    def expectation(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=np.float64)
        return float(np.dot(self.diag, v * v) + 2.0 * np.dot(self.offdiag, v[:-1] * v[1:]))


def build_hamiltonian(params: JunctionParams) -> TridiagonalHamiltonian:
    """Bands of H = -J(a1+ a2 + a1 a2+) + (delta/2) N_r + (E_C/8) N_r^2."""
    n = params.n_total
    k = np.arange(n + 1, dtype=np.float64)
    nr = n - 2.0 * k
    diag = 0.5 * params.asymmetry_delta * nr + 0.125 * params.charging_ec * nr * nr
    kk = k[:-1]
    offdiag = -params.tunneling_j * np.sqrt((kk + 1.0) * (n - kk))
    return TridiagonalHamiltonian(diag, offdiag)


def zero_tunneling_energy(params: JunctionParams, n) -> float:
    """E*(n) = delta * n + E_C * n^2 / 2 for the J = 0 eigenstate of momentum n."""
    two_n = twice_n(params.n_total, n)
    # (2n) form keeps half-integers exact: delta*(2n)/2 + E_C*(2n)^2/8
    return 0.5 * params.asymmetry_delta * two_n + 0.125 * params.charging_ec * two_n * two_n


def _require_charging(params: JunctionParams):
    if params.charging_ec <= 0:
        raise ValueError("resonance positions need charging_ec > 0")


def single_atom_resonances(params: JunctionParams) -> list[float]:
    """Asymmetries delta = -E_C (n + 1/2) where E*(n) = E*(n+1), ascending.

    One value per adjacent pair n, n+1 with n = -N/2 ... N/2 - 1.
    """
    _require_charging(params)
    n = params.n_total
    # 2n runs over -N, -N+2, ..., N-2; delta = -E_C (2n + 1) / 2
    values = [-params.charging_ec * (two_n + 1) / 2 for two_n in range(-n, n - 1, 2)]
    return sorted(values)


def two_atom_resonances(params: JunctionParams) -> list[float]:
    """Asymmetries delta = -E_C (n + 1) where E*(n) = E*(n+2), ascending."""
    _require_charging(params)
    n = params.n_total
    values = [-params.charging_ec * (two_n + 2) / 2 for two_n in range(-n, n - 3, 2)]
    return sorted(values)
