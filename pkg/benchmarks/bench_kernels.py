"""Time each hot kernel in its numba and pure-numpy flavour.

    python3 benchmarks/bench_kernels.py [--n 100] [--repeat 5]

The first numba call includes compilation and is excluded (warm-up).
"""
import argparse
import time

import numpy as np

from bjjlab import _kernels
from bjjlab.eigensolve import EPS, MAX_QL_ITERATIONS
from bjjlab.model import JunctionParams, build_hamiltonian


def best_of(fn, make_args, repeat):
    fn(*make_args())
    times = []
    for _ in range(repeat):
        args = make_args()
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    h = build_hamiltonian(JunctionParams.from_junction_energy(n, 1.0, 0.1, 0.05))
    d = np.array(h.diag)
    e = np.zeros(n + 1)
    e[:-1] = h.offdiag
    dense = h.to_dense()
    vecs = np.linalg.eigh(dense)[1]
    half = n / 2
    n_grid = np.linspace(-half, half, 1025)
    cos_phi = np.cos(-np.pi + 2 * np.pi * np.arange(512) / 512)
    jn = min(n, 60)
    small = build_hamiltonian(JunctionParams(jn, 1.0, 0.1, 0.05)).to_dense()
    return {
        f"tql (dim {n + 1})": (
            (_kernels.tql_numba, _kernels.tql_numpy),
            lambda: (d.copy(), e.copy(), np.eye(n + 1), EPS, MAX_QL_ITERATIONS),
        ),
        f"jacobi (dim {jn + 1})": (
            (_kernels.jacobi_numba, _kernels.jacobi_numpy),
            lambda: (small.copy(), np.eye(jn + 1), 1e-13 * np.linalg.norm(small), 100),
        ),
        f"moments ({n + 1} states)": (
            (_kernels.state_moments_numba, _kernels.state_moments_numpy),
            lambda: (vecs, n),
        ),
        "classical sums (1025 x 512)": (
            (_kernels.classical_sums_numba, _kernels.classical_sums_numpy),
            lambda: (n_grid, cos_phi, 10.0, 0.1, 0.05, 1.0, float(n)),
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':30s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for name, ((fast, slow), make) in cases(args.n).items():
        tf = best_of(fast, make, args.repeat)
        ts = best_of(slow, make, args.repeat)
        print(f"{name:30s} {1e3 * tf:12.3f} {1e3 * ts:12.3f} {ts / tf:8.1f}x")


if __name__ == "__main__":
    main()
