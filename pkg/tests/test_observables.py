import math

import numpy as np
import pytest
from scipy.special import comb

from bjjlab.eigensolve import diagonalize
from bjjlab.model import JunctionParams, build_hamiltonian
from bjjlab.observables import (
    binomial_state,
    coherence_stats,
    ensemble_coherence_stats,
    ensemble_number_stats,
    fock_state,
    hop_moment_1,
    hop_moment_2,
    ks_norm,
    moments,
    number_stats,
)

from conftest import random_state

try:
    from hypothesis import given, settings, strategies as st
except ImportError:  # pragma: no cover
    given = None


def ladder(n):
    """Dense a1^+ a2 on the Fock basis k = n1."""
    a = np.zeros((n + 1, n + 1))
    for k in range(n):
        a[k + 1, k] = math.sqrt((k + 1) * (n - k))
    return a


def dense_coherence(c, n):
    """<cos>, <cos^2> from X = a1^+a2 + h.c. and K = a1^+a1 a2 a2^+ + a1 a1^+ a2^+ a2."""
    a = ladder(n)
    x = a + a.T
    k = a @ a.T + a.T @ a
    ks = c @ k @ c
    return (c @ x @ c) / math.sqrt(2 * ks), (c @ x @ x @ c) / (2 * ks), ks


N1 = np.array([2**-0.5, 2**-0.5])
N2 = np.array([0.5, 2**-0.5, 0.5])


def test_moment_examples():
    assert hop_moment_1(N1, 1) == pytest.approx(1.0, abs=1e-15)
    assert hop_moment_1(N2, 2) == pytest.approx(2.0, abs=1e-15)
    assert hop_moment_1(fock_state(2, 1), 2) == 0.0
    assert hop_moment_2(N1, 1) == 0.0
    assert hop_moment_2(N2, 2) == pytest.approx(1.0, abs=1e-15)
    assert hop_moment_2(fock_state(2, 1), 2) == 0.0
    assert ks_norm(N1, 1) == pytest.approx(1.0, abs=1e-15)
    assert ks_norm(N2, 2) == pytest.approx(3.0, abs=1e-15)
    for n in (2, 10, 64):
        assert ks_norm(fock_state(n, n // 2), n) == pytest.approx(n * n / 2 + n)


def test_coherence_examples():
    s = coherence_stats(N1, 1)
    assert s.mean_cos == pytest.approx(2**-0.5, abs=1e-15)
    assert s.mean_cos2 == pytest.approx(0.5, abs=1e-15)
    assert s.var_cos == pytest.approx(0.0, abs=1e-15)
    s = coherence_stats(N2, 2)
    assert s.mean_cos == pytest.approx(2 / math.sqrt(6), abs=1e-15)
    assert s.mean_cos2 == pytest.approx(2 / 3, abs=1e-15)
    assert s.var_cos == pytest.approx(0.0, abs=1e-15)
    for n in (2, 8, 100):
        f = coherence_stats(fock_state(n, n // 2), n)
        assert f.mean_cos == 0.0
        assert f.var_cos == 0.5


def test_number_examples():
    for n in (1, 5, 40, 300):
        s = number_stats(binomial_state(n), n)
        assert s.var_nr == pytest.approx(n, rel=1e-12)
        assert s.inv_s_squared == pytest.approx(1.0, rel=1e-12)
    s = number_stats(fock_state(10, 5), 10)
    assert s.var_nr == 0.0 and s.inv_s_squared == 0.0
    s = number_stats(fock_state(10, 10), 10)
    assert s.mean_nr == -10 and s.var_nr == 0.0


def test_binomial_state_definition():
    n = 30
    np.testing.assert_allclose(binomial_state(n) ** 2, comb(n, np.arange(n + 1)) / 2.0**n, rtol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_against_dense_operators(rng, n):
    for _ in range(10):
        c = random_state(rng, n)
        mc, mc2, ks = dense_coherence(c, n)
        s = coherence_stats(c, n)
        assert s.mean_cos == pytest.approx(mc, abs=1e-13)
        assert s.mean_cos2 == pytest.approx(mc2, abs=1e-13)
        assert s.ks == pytest.approx(ks, rel=1e-13)
        nr = n - 2.0 * np.arange(n + 1)
        ns = number_stats(c, n)
        assert ns.mean_nr == pytest.approx(c**2 @ nr, abs=1e-12)
        assert ns.var_nr == pytest.approx(c**2 @ nr**2 - (c**2 @ nr) ** 2, abs=1e-11)


def test_unnormalized_rejected():
    with pytest.raises(ValueError):
        coherence_stats(np.array([1.0, 1.0]), 1)
    with pytest.raises(ValueError):
        moments(np.ones(3), 3)  # wrong length


def test_ensembles():
    p = JunctionParams(2)
    spec = diagonalize(build_hamiltonian(p))
    delta = np.array([1.0, 0.0, 0.0])
    a = ensemble_coherence_stats(delta, spec.eigenvectors, 2)
    b = coherence_stats(spec.eigenvectors[:, 0], 2)
    assert a == b
    u = ensemble_coherence_stats(np.full(3, 1 / 3), spec.eigenvectors, 2)
    assert u.mean_cos == pytest.approx(0.0, abs=1e-15)
    assert u.mean_cos2 == pytest.approx(0.5, abs=1e-15)
    assert u.var_cos == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose([hop_moment_1(spec.eigenvectors[:, i], 2) for i in range(3)], [2, 0, -2],
                               atol=1e-14)
    n = 9
    f = ensemble_coherence_stats(np.full(n + 1, 1 / (n + 1)), np.eye(n + 1), n)
    assert f.mean_cos == 0.0 and f.var_cos == 0.5
    num = ensemble_number_stats(np.full(n + 1, 1 / (n + 1)), np.eye(n + 1), n)
    assert num.var_nr == pytest.approx(np.mean((n - 2.0 * np.arange(n + 1)) ** 2))
    with pytest.raises(ValueError):
        ensemble_coherence_stats(np.array([0.5, 0.6, -0.1]), spec.eigenvectors, 2)


def _check_invariants(c, n):
    s = coherence_stats(c, n)
    assert s.mean_cos2 + s.mean_sin2 == pytest.approx(1.0, abs=1e-12)
    assert -1e-15 <= s.var_cos <= 0.5 + abs(s.mean_cos_2phi) / 2 + 1e-12
    assert s.var_cos <= 1.0
    assert abs(s.mean_cos) <= 1.0 + 1e-12


if given is not None:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 64), st.integers(0, 2**32 - 1))
    def test_invariants_property(n, seed):
        _check_invariants(random_state(np.random.default_rng(seed), n), n)
else:  # pragma: no cover
    def test_invariants_property(rng):
        for n in range(1, 65):
            _check_invariants(random_state(rng, n), n)
