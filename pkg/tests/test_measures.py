import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobiavg import models
from jacobiavg.lattice import extract_window
from jacobiavg.measures import (EmpiricalMeasure, convergence_in_probability,
                                cylinder_distance, drr_statistic, empirical_measure,
                                moment_vector, periodic_measure)

from conftest import random_jacobi


def test_empirical_windows_match_extraction():
    J = random_jacobi(2)
    mu = empirical_measure(J, 20, 3)
    assert mu.size == 20 and mu.a.shape == (20, 7)
    assert mu.weights.sum() == pytest.approx(1.0)
    for n, W in enumerate(mu.windows()):
        ref = extract_window(J, n - 3, 7)
        assert W.offset == n - 3
        assert np.array_equal(W.diag, ref.diag)
        assert np.array_equal(W.offdiag, ref.offdiag)
    with pytest.raises(ValueError):
        empirical_measure(J, 0, 2)


def test_empirical_examples():
    mu = empirical_measure(models.constant(0.4), 50, 2)
    assert np.all(mu.b == 0.4) and np.all(mu.a == 1.0)
    P = models.periodic([0.0, 1.0, -1.0])
    mu = empirical_measure(P, 300, 2)
    rows = {tuple(r) for r in mu.b}
    assert len(rows) == 3
    mu = empirical_measure(models.free(), 1, 1)
    assert np.all(mu.b == 0) and np.all(mu.a == 1)


def test_moment_vector_shape_and_bounds():
    mu = empirical_measure(models.anderson(1, 2.0), 1000, 2)
    nvar = 2 * 5
    v1 = moment_vector(mu, 1)
    v2 = moment_vector(mu, 2)
    assert v1.values.size == nvar
    assert v2.values.size == nvar + nvar * (nvar + 1) // 2
    assert np.all(np.abs(v2.values) <= 1.0)
    assert np.array_equal(v2.values[:nvar], v1.values)
    assert "K=2" in v2.dictionary
    with pytest.raises(ValueError):
        moment_vector(mu, 3)


def test_cylinder_distance_examples():
    m = empirical_measure(models.anderson(3, 1.0), 500, 1)
    assert cylinder_distance(m, m) == 0.0
    c0 = empirical_measure(models.constant(0.0), 10, 0)
    cd = empirical_measure(models.constant(0.3), 10, 0)
    assert cylinder_distance(c0, cd, degree=1) == pytest.approx(0.3 / 2.0)
    P = models.periodic([0.0, 1.0])
    exact = periodic_measure(P, 2, 3)
    assert cylinder_distance(empirical_measure(P, 2000, 3), exact) <= 1e-15
    with pytest.raises(ValueError):
        cylinder_distance(c0, m)
    with pytest.raises(ValueError):
        periodic_measure(models.periodic([0.0, 1.0, 0.5]), 2, 1)


def test_periodic_rate():
    # for period p the empirical moments are off by O(1/N): frozen constant C = 1
    P = models.periodic([0.5, -1.0, 1.5, 0.0, 2.0])
    exact = periodic_measure(P, 5, 2)
    for N in (101, 1003, 10_004):
        assert cylinder_distance(empirical_measure(P, N, 2), exact) <= 1.0 / N


@given(st.integers(0, 2**32), st.integers(0, 2**32), st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_pseudometric(s1, s2, s3):
    ms = [empirical_measure(random_jacobi(s), 300, 1) for s in (s1, s2, s3)]
    d = lambda x, y: cylinder_distance(x, y)
    assert d(ms[0], ms[1]) == d(ms[1], ms[0])
    assert d(ms[0], ms[1]) <= d(ms[0], ms[2]) + d(ms[2], ms[1]) + 1e-15


def test_convergence_in_probability_examples():
    assert convergence_in_probability(models.free(), "free_torus", 1000, 1e-9, 4) == 0.0
    S = models.sparse_squares(1.0)
    N, K = 10**5, 8
    val = convergence_in_probability(S, "free_torus", N, 0.5, K)
    assert 0 < val <= (2 * K + 1) * int(np.sqrt(N)) / N
    assert convergence_in_probability(models.constant(1.0), "free_torus", 500, 0.5, 3) == 1.0
    # a shift-invariant J is at distance 0 from every translate
    J = models.constant(0.7)
    assert convergence_in_probability(J, J, 1000, 1e-12, 5) == 0.0
    P = models.periodic([0.0, 1.0])
    assert convergence_in_probability(P, P, 1000, 1e-3, 5) == 0.5
    J = models.anderson(4, 1.0)
    with pytest.raises(ValueError):
        convergence_in_probability(J, "torus", 10, 0.5, 2)
    with pytest.raises(ValueError):
        convergence_in_probability(J, J, 10, 0.0, 2)


def test_drr_examples():
    assert drr_statistic(models.sparse_squares(1.0), 10**5, 0.5) == 0.00316
    assert drr_statistic(models.free(), 1000, 0.1) == 0.0
    assert drr_statistic(models.constant(1.0), 1000, 0.5) == 1.0
    with pytest.raises(ValueError):
        drr_statistic(models.free(), 10, 0.0)


@given(st.integers(0, 2**32), st.floats(0.01, 1.0), st.floats(0.01, 1.0))
@settings(max_examples=25, deadline=None)
def test_drr_monotone_in_eps(seed, e1, e2):
    J = models.anderson(seed, 1.5)
    lo, hi = sorted((e1, e2))
    assert drr_statistic(J, 2000, hi) <= drr_statistic(J, 2000, lo)
