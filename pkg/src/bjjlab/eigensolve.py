"""Full spectral decomposition of the tridiagonal Hamiltonian.

``diagonalize`` runs implicit-shift QL with Wilkinson shifts. The dense
cyclic-Jacobi routine is an independent oracle for tests and is limited to
small matrices.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import TridiagonalHamiltonian

EPS = np.finfo(np.float64).eps
MAX_QL_ITERATIONS = 50
MAX_JACOBI_SWEEPS = 100
ORACLE_MAX_DIM = 200
DEGENERACY_RTOL = 1e-9


class ConvergenceError(RuntimeError):
    """An iterative numerical routine exceeded its iteration budget."""


class DegeneracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues; ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.flags.writeable = False
        self.eigenvectors.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def scale(self) -> float:
        """Spectral radius, floored at 1."""
        return max(1.0, float(np.max(np.abs(self.eigenvalues))))

    def ground_multiplicity(self, rtol: float = DEGENERACY_RTOL) -> int:
        gaps = self.eigenvalues - self.eigenvalues[0]
        return int(np.count_nonzero(gaps <= rtol * self.scale))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    cols = np.arange(vecs.shape[1])
    pivots = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[pivots, cols] < 0, -1.0, 1.0)
    return vecs * signs


def _finish(values: np.ndarray, vecs: np.ndarray) -> SpectralDecomposition:
    order = np.argsort(values, kind="stable")
    values = np.ascontiguousarray(values[order])
    vecs = _fix_signs(np.ascontiguousarray(vecs[:, order]))
    return SpectralDecomposition(values, vecs)


def diagonalize(h: TridiagonalHamiltonian) -> SpectralDecomposition:
    """Eigen-decomposition of a symmetric tridiagonal matrix.

    Each eigenvector's largest-magnitude component is made positive so the
    output is reproducible. Raises ``ConvergenceError`` if some eigenvalue
    needs more than 50 QL iterations.
    """
    n = h.dim
    d = np.array(h.diag, dtype=np.float64)
    e = np.zeros(n)
    e[: n - 1] = h.offdiag
    zt = np.eye(n)
    status = _kernels.tql(d, e, zt, EPS, MAX_QL_ITERATIONS)
    if status >= 0:
        raise ConvergenceError(
            f"QL iteration did not converge for eigenvalue {status} "
            f"after {MAX_QL_ITERATIONS} iterations"
        )
    return _finish(d, zt.T)


def ground_state(h: TridiagonalHamiltonian, warn: bool = True) -> tuple[float, np.ndarray]:
    """Lowest eigenpair. Warns when the ground level looks degenerate."""
    spec = diagonalize(h)
    if warn and spec.dim > 1 and spec.ground_multiplicity() > 1:
        warnings.warn(
            "ground state is degenerate to within 1e-9 of the spectral scale; "
            "the reported eigenvector is one arbitrary member of the multiplet",
            DegeneracyWarning,
            stacklevel=2,
        )
    return float(spec.eigenvalues[0]), spec.eigenvectors[:, 0].copy()


def dense_oracle_diagonalize(h) -> SpectralDecomposition:
    """Cyclic Jacobi on a dense symmetric matrix, for verification only.

    Accepts an array or a ``TridiagonalHamiltonian``. Rotates until the
    off-diagonal Frobenius norm is at most 1e-13 times the matrix norm.
    """
    if isinstance(h, TridiagonalHamiltonian):
        h = h.to_dense()
    a = np.array(h, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("oracle needs a square matrix")
    n = a.shape[0]
    if n > ORACLE_MAX_DIM:
        raise ValueError(f"oracle is limited to dimension <= {ORACLE_MAX_DIM}, got {n}")
    if not np.array_equal(a, a.T):
        raise ValueError("oracle needs an exactly symmetric matrix")
    v = np.eye(n)
    tol = 1e-13 * float(np.linalg.norm(a))
    sweeps = _kernels.jacobi(a, v, tol, MAX_JACOBI_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi did not converge in {MAX_JACOBI_SWEEPS} sweeps")
    return _finish(np.diag(a).copy(), v)
