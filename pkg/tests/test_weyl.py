import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobiavg import models
from jacobiavg.averaging import gamma_const
from jacobiavg.lattice import reflect
from jacobiavg.transfer import cosine_sine, lyapunov_finite
from jacobiavg.weyl import (MFunctionError, box_m, lyap_via_m, m_minus, m_plus,
                            m_plus_shifts, reflectionless_defect, u_plus_check)

from conftest import random_jacobi

GOLDEN = 0.61803398874989485  # (sqrt 5 - 1)/2


def test_free_m_plus():
    m = m_plus(models.free(), 1j)
    assert abs(m.value - GOLDEN * 1j) <= 1e-8
    assert m.method == "continued-fraction" and m.est_error < 1e-12
    m = m_plus(models.free(), 3 + 1e-6j, tol=1e-10)
    assert m.value.real == pytest.approx((-3 + np.sqrt(5)) / 2, abs=1e-5)


def test_methods_agree():
    J = models.anderson(11, 1.0)
    for z in (0.3 + 0.5j, -1 + 0.01j, 2 + 1e-3j):
        cf = m_plus(J, z, 1e-12).value
        box = m_plus(J, z, 1e-12, method="box-resolvent").value
        assert abs(cf - box) <= 1e-10


def test_domain_errors():
    with pytest.raises(ValueError):
        m_plus(models.free(), 1.0)
    with pytest.raises(ValueError):
        m_plus(models.free(), 1j, method="qr")
    with pytest.raises(MFunctionError) as info:
        m_plus(models.free(), 0.5 + 1e-9j, max_depth=4096)
    assert info.value.best.depth == 4096


def test_m_minus_conventions():
    for J in (models.free(), models.constant(0.7)):
        for z in (1j, 0.4 + 0.3j):
            assert m_minus(J, z).value == pytest.approx(m_plus(J, z).value, abs=1e-12)
    J = models.decaying(1.0, 0.5)
    assert m_minus(J, 1j).value == m_plus(reflect(J), 1j).value


def test_box_m_examples():
    assert box_m(models.free(), 1j, 0) == pytest.approx(1j)
    assert box_m(models.free(), 2j, 1) == pytest.approx(0.4j)
    with pytest.raises(ValueError):
        box_m(models.free(), 1.0, 2)


@given(st.integers(0, 2**32), st.floats(-4, 4), st.floats(1e-2, 3))
@settings(max_examples=200, deadline=None)
def test_herglotz_and_resolvent_bound(seed, E, eta):
    J = random_jacobi(seed)
    z = complex(E, eta)
    m = m_plus(J, z, 1e-12).value
    assert m.imag > 0
    assert abs(m) <= 1 / eta * (1 + 1e-12)
    mN = box_m(J, z, seed % 40)
    assert mN.imag > 0 and abs(mN) <= 1 / eta * (1 + 1e-12)


@given(st.integers(0, 2**32), st.integers(0, 200), st.floats(-3, 3), st.floats(0.05, 1))
@settings(max_examples=60, deadline=None)
def test_c_ratio_identity(seed, N, E, eta):
    J = random_jacobi(seed)
    z = complex(E, eta)
    c1 = cosine_sine(J, z, N + 1)
    ratio = c1.c / c1.c_prev  # c(N+1) / c(N); both carry the same scale
    expect = -1.0 / (J.a(N) * box_m(J, z, N))
    assert abs(ratio - expect) <= 1e-10 * abs(expect)


def test_lyap_via_m_examples():
    assert lyap_via_m(models.free(), 2j, 100) == pytest.approx(0.88137358701954303, abs=1e-3)
    J = models.constant(0.5)
    z = 0.2 + 0.7j
    assert lyap_via_m(J, z, 50) == pytest.approx(-np.log(abs(m_plus(J, z).value)), abs=1e-12)
    assert lyap_via_m(J, z, 50) == pytest.approx(gamma_const(0.5, z), abs=1e-10)
    A = models.anderson(42, 1.0)
    assert abs(lyap_via_m(A, 0.5j, 10_000) - lyapunov_finite(A, 0.5j, 10_000)) <= 1e-2


def test_m_plus_shifts_agree_with_single():
    J = models.anderson(5, 2.0)
    z = -0.4 + 0.3j
    vals, depth = m_plus_shifts(J, z, 20)
    from jacobiavg.lattice import shift
    for n in (0, 7, 19):
        assert abs(vals[n] - m_plus(shift(J, n), z).value) <= 1e-10


def test_u_plus_examples():
    rep = u_plus_check(models.free(), 1j, 3)
    assert rep.u_abs == pytest.approx(GOLDEN ** 4, rel=1e-10)
    assert rep.rel_error <= 1e-10
    for N in range(6):
        assert u_plus_check(models.free(), 0.5 + 1j, N).sign == (-1) ** (N + 1)
    assert u_plus_check(models.constant(1.0), 2j, 5).rel_error <= 1e-8


@pytest.mark.parametrize("seed", range(4))
def test_u_plus_modulus_generic(seed):
    J = random_jacobi(seed)
    for N in (0, 3, 25):
        assert u_plus_check(J, 0.3 + 0.5j, N).rel_error <= 1e-6


def test_reflectionless_defect():
    assert reflectionless_defect(models.free(), 0.0, 1e-4) <= 1e-3
    for E in (-1.5, 0.4, 1.9):
        assert reflectionless_defect(models.free(), E, 1e-4) <= 1e-3
    assert reflectionless_defect(models.constant(0.6), 1.1, 1e-3) <= 1e-2
    assert reflectionless_defect(models.anderson(42, 2.0), 0.0, 1e-3) > 0.05
    with pytest.raises(ValueError):
        reflectionless_defect(models.free(), 0.0, 0.0)
