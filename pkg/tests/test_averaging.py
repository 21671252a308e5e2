import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobiavg import models
from jacobiavg.averaging import (average_r0, average_skew_mc, compare_average, gamma_const,
                                 k_const, simonzhu_interval)
from jacobiavg.eigen import dos_measure, log_potential
from jacobiavg.models import ProfileFunction
from jacobiavg.transfer import lyapunov_finite

# int_0^1 arccosh((E - x)/2)_+ dx for f = identity, via the antiderivative
# x arccosh x - sqrt(x^2 - 1) evaluated at 40 digits
LYAP_R0_IDENTITY = {2.5: 0.23286795139986327, 3.0: 0.65120297285783099,
                    4.0: 1.1525269997036813}
# int_0^1 (1/pi) arccos(-(E - x)/2) dx, same method
IDS_R0_IDENTITY = {0.0: 0.41862421027912263, 1.0: 0.58137578972087737}


def test_gamma_const_examples():
    assert gamma_const(0.0, 1.0) == 0.0
    assert gamma_const(0.0, 3.0) == pytest.approx(0.96242365011920689, abs=1e-15)
    assert gamma_const(0.0, 2j) == pytest.approx(0.88137358701954303, abs=1e-15)
    assert gamma_const(1.0, -2.0) == pytest.approx(np.arccosh(1.5), abs=1e-15)
    assert np.allclose(gamma_const(np.array([0.0, 0.5]), 3.0),
                       [np.arccosh(1.5), np.arccosh(1.25)])
    assert gamma_const(0.0, 3.0) == pytest.approx(lyapunov_finite(models.free(), 3.0, 10**5),
                                                  abs=1e-4)


def test_k_const_examples():
    assert k_const(0.0, 0.0) == pytest.approx(0.5)
    assert k_const(1.0, -1.0) == 0.0
    assert k_const(0.0, 2.0) == 1.0
    assert k_const(0.0, -5.0) == 0.0


@pytest.mark.parametrize("c,z", [(0.0, 3.0), (0.5, 0.2 + 0.5j), (-0.3, 1.0 + 2j)])
def test_gamma_const_thouless(c, z):
    nu = dos_measure(models.constant(c), 4000)
    assert gamma_const(c, z) == pytest.approx(log_potential(nu, z), abs=2e-3)


@given(st.floats(-3, 3), st.floats(-6, 6), st.floats(0, 3))
@settings(max_examples=100, deadline=None)
def test_gamma_const_nonnegative_continuous(c, E, eta):
    g = gamma_const(c, complex(E, eta))
    assert g >= 0
    assert abs(gamma_const(c, complex(E, eta + 1e-9)) - g) <= 1e-4


def test_zero_exponent_interval():
    iv = simonzhu_interval(ProfileFunction.constant(0.0))
    assert (iv.lo, iv.hi) == (-2.0, 2.0)
    iv = simonzhu_interval(ProfileFunction.identity())
    assert (iv.lo, iv.hi) == (-1.0, 2.0) and 0.5 in iv
    assert simonzhu_interval(ProfileFunction.table([0, 0.5, 1], [-3, 3, -3])).empty


def test_average_r0_examples():
    assert average_r0(ProfileFunction.constant(0.4), 3.0) == pytest.approx(gamma_const(0.4, 3.0), rel=1e-15)
    f = ProfileFunction.identity()
    for E, v in LYAP_R0_IDENTITY.items():
        val, err = average_r0(f, E, "lyapunov", 4096, full_output=True)
        assert val == pytest.approx(v, abs=1e-6)
        assert abs(val - v) <= 4 * err + 1e-12
    for E, v in IDS_R0_IDENTITY.items():
        assert average_r0(f, E, "ids", 4096) == pytest.approx(v, abs=1e-7)
    assert average_r0(f, 0.5) == 0.0
    with pytest.raises(ValueError):
        average_r0(f, 0.5, "dos")
    with pytest.raises(ValueError):
        average_r0(f, 0.5, nodes=1)


def test_average_r0_invariants():
    f = ProfileFunction.trig(0.2, 1.0, 0.5)
    iv = simonzhu_interval(f)
    E = np.linspace(-5, 5, 201)
    L = np.array([average_r0(f, e) for e in E])
    assert np.all(L >= 0)
    assert np.all(L[(E >= iv.lo) & (E <= iv.hi)] == 0.0)
    k = np.array([average_r0(f, e, "ids") for e in E])
    assert np.all(np.diff(k) >= 0)
    assert np.all(k[E < -2 + f.fmin] == 0) and np.all(k[E > 2 + f.fmax] == 1)


def test_skew_mc_trivial_profiles():
    est = average_skew_mc(ProfileFunction.constant(0.0), 1.0, 1, n_alpha=4, n_omega=2,
                          N_inner=2000, seed=3)
    assert abs(est.mean) <= 1e-2 and est.samples.shape == (4, 2)
    est = average_skew_mc(ProfileFunction.constant(0.5), 3.5, 2, n_alpha=4, n_omega=1,
                          N_inner=5000, seed=1)
    assert est.mean == pytest.approx(gamma_const(0.5, 3.5), abs=1e-3)
    assert est.stderr <= 1e-3


def test_skew_mc_deterministic():
    f = ProfileFunction.trig(0.0, 1.0)
    a = average_skew_mc(f, 3.0, 1, n_alpha=4, n_omega=2, N_inner=2000, seed=9)
    b = average_skew_mc(f, 3.0, 1, n_alpha=4, n_omega=2, N_inner=2000, seed=9)
    assert np.array_equal(a.samples, b.samples)
    with pytest.raises(ValueError):
        average_skew_mc(f, 3.0, 0)


def test_rational_rotation_is_periodic():
    # r = 1, alpha = p/q, omega = 0 is the period-q potential f(k p / q)
    f = ProfileFunction.trig(0.0, 1.5)
    q = 5
    vals = f(np.arange(q) * 2 / q)
    J = models.skewshift(f, models.SkewShiftState(1, 2 / q, (0.0,)))
    for E in (0.3 + 0.0j, 2.9 + 0.0j):
        assert lyapunov_finite(J, E, 20_000) == pytest.approx(
            lyapunov_finite(models.periodic(vals), E, 20_000), abs=1e-2)


def test_compare_average_report():
    f = ProfileFunction.identity()
    rep = compare_average(f, 0.5, [3.0, 4.0], "lyapunov", N=20_000, nodes=1024)
    assert rep.E.shape == rep.lhs.shape == rep.rhs.shape == (2,)
    assert np.array_equal(rep.gap, np.abs(rep.lhs - rep.rhs))
    assert rep.params["r"] == 0 and rep.params["nodes"] == 1024
    with pytest.raises(ValueError):
        compare_average(f, 1.5, [3.0], "ids", N=100)
