import math

import numpy as np
import pytest

from bjjlab.model import (
    JunctionParams,
    build_hamiltonian,
    fock_index,
    quasi_angular_momentum,
    relative_number,
    single_atom_resonances,
    twice_n,
    two_atom_resonances,
    zero_tunneling_energy,
)


def second_quantized_dense(p):
    """H from explicit ladder operators on the two-mode Fock space (k = n1)."""
    n = p.n_total
    d = n + 1
    a1a2 = np.zeros((d, d))
    for k in range(n):
        # a1^+ a2 |k, N-k> = sqrt((k+1)(N-k)) |k+1, N-k-1>
        a1a2[k + 1, k] = math.sqrt((k + 1) * (n - k))
    nr = np.diag([float(n - 2 * k) for k in range(d)])
    return (-p.tunneling_j * (a1a2 + a1a2.T) + 0.5 * p.asymmetry_delta * nr
            + p.charging_ec / 8.0 * nr @ nr)


def test_params_validation():
    with pytest.raises(ValueError):
        JunctionParams(0)
    with pytest.raises(ValueError):
        JunctionParams(4, charging_ec=-1.0)
    with pytest.raises(ValueError):
        JunctionParams(4, asymmetry_delta=math.nan)
    p = JunctionParams.from_junction_energy(100, 100.0, 800.0, 3.0)
    assert p.tunneling_j == pytest.approx(1.0)
    assert p.junction_energy() == pytest.approx(100.0)
    assert p.dim == 101
    assert p.replace(charging_ec=5.0).charging_ec == 5.0


def test_n1_matrix():
    h = build_hamiltonian(JunctionParams(1, 1.0))
    np.testing.assert_array_equal(h.to_dense(), [[0.0, -1.0], [-1.0, 0.0]])


@pytest.mark.parametrize("n,j,ec,delta", [(1, 1, 0, 0), (2, 0.7, 3.0, -1.1), (7, 1.3, 0.2, 5.0), (20, 1, 80, -30)])
def test_matches_second_quantized(n, j, ec, delta):
    p = JunctionParams(n, j, ec, delta)
    np.testing.assert_allclose(build_hamiltonian(p).to_dense(), second_quantized_dense(p), rtol=0, atol=1e-12)


def test_hamiltonian_immutable():
    h = build_hamiltonian(JunctionParams(3))
    with pytest.raises(ValueError):
        h.diag[0] = 1.0


def test_matvec_and_expectation(rng):
    h = build_hamiltonian(JunctionParams(9, 1.0, 2.0, 0.5))
    v = rng.standard_normal(10)
    np.testing.assert_allclose(h.matvec(v), h.to_dense() @ v, atol=1e-12)
    u = v / np.linalg.norm(v)
    assert h.expectation(u) == pytest.approx(u @ h.to_dense() @ u, abs=1e-12)
    assert h.inf_norm() == pytest.approx(np.abs(h.to_dense()).sum(axis=1).max())


def test_index_maps():
    n = 6
    k = np.arange(n + 1)
    np.testing.assert_array_equal(relative_number(n, k), n - 2 * k)
    np.testing.assert_array_equal(quasi_angular_momentum(n, k), (n - 2 * k) / 2)
    for kk in range(n + 1):
        assert fock_index(n, quasi_angular_momentum(n, kk)) == kk
    assert twice_n(5, 1.5) == 3
    with pytest.raises(ValueError):
        twice_n(5, 1.0)  # parity mismatch
    with pytest.raises(ValueError):
        twice_n(4, 3)


def test_zero_tunneling_energy_equals_diagonal():
    p = JunctionParams(11, 1.0, 3.7, -2.3)
    h = build_hamiltonian(p)
    for k in range(p.dim):
        n = quasi_angular_momentum(p.n_total, k)
        assert zero_tunneling_energy(p, n) == h.diag[k]
        assert zero_tunneling_energy(p, n) == pytest.approx(p.charging_ec * n * n / 2 + p.asymmetry_delta * n)


def test_resonances_degenerate_levels():
    p = JunctionParams(8, 1.0, 2.0)
    singles = single_atom_resonances(p)
    assert singles == sorted(singles)
    for d in singles:
        q = p.replace(asymmetry_delta=d)
        n = -d / p.charging_ec - 0.5
        assert zero_tunneling_energy(q, n) == pytest.approx(zero_tunneling_energy(q, n + 1), abs=1e-12)
    for d in two_atom_resonances(p):
        q = p.replace(asymmetry_delta=d)
        n = -d / p.charging_ec - 1.0
        assert zero_tunneling_energy(q, n) == pytest.approx(zero_tunneling_energy(q, n + 2), abs=1e-12)
    with pytest.raises(ValueError):
        single_atom_resonances(JunctionParams(4))


@pytest.mark.parametrize("args,diag,off", [
    ((2, 1.0, 2.0, 0.0), [1, 0, 1], [-math.sqrt(2), -math.sqrt(2)]),
    ((1, 1.0, 0.0, 4.0), [2, -2], [-1]),
    ((4, 0.0, 8.0, 0.0), [16, 4, 0, 4, 16], [0, 0, 0, 0]),
])
def test_build_examples(args, diag, off):
    h = build_hamiltonian(JunctionParams(*args))
    np.testing.assert_allclose(h.diag, diag, atol=1e-15)
    np.testing.assert_allclose(h.offdiag, off, atol=1e-15)


def test_zero_tunneling_examples():
    p = JunctionParams(10, 1.0, 100.0, -50.0)
    assert zero_tunneling_energy(p, 0) == 0.0
    assert zero_tunneling_energy(p, 1) == 0.0
    assert zero_tunneling_energy(JunctionParams(6, 1.0, 2.0), 3) == 9.0
    q = JunctionParams(4, 1.0, 3.4, 1.7)
    assert zero_tunneling_energy(q, -1) == pytest.approx(0.0, abs=1e-15)


def test_resonance_examples():
    assert single_atom_resonances(JunctionParams(2, 1.0, 100.0)) == [-50.0, 50.0]
    big = single_atom_resonances(JunctionParams(100, 1.0, 800.0))
    assert len(big) == 100
    np.testing.assert_allclose(big, sorted(-800 * (k + 0.5) for k in range(-50, 50)))
    np.testing.assert_allclose(single_atom_resonances(JunctionParams(10, 1.0, 10.0)),
                               sorted(-10 * (k + 0.5) for k in range(-5, 5)))
    assert two_atom_resonances(JunctionParams(2, 1.0, 7.0)) == [0.0]
    assert two_atom_resonances(JunctionParams(4, 1.0, 8.0)) == [-8.0, 0.0, 8.0]
    assert two_atom_resonances(JunctionParams(1, 1.0, 3.0)) == []


def test_parity_symmetry_of_spectrum():
    from bjjlab.eigensolve import diagonalize
    p = JunctionParams(13, 1.0, 1.7, 2.9)
    a = diagonalize(build_hamiltonian(p)).eigenvalues
    b = diagonalize(build_hamiltonian(p.replace(asymmetry_delta=-2.9))).eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-12)
