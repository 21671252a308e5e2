"""Potentials f(n^rho mod 1) with 0 < rho < 1.

The phase n^rho moves so slowly that the operator looks locally constant, and
the Lyapunov exponent becomes the average over alpha of the exponent of the
constant potential f(alpha).  Inside [-2 + max f, 2 + min f] every constant
piece sits in its band, so the exponent vanishes there.
"""
import numpy as np

import jacobiavg as ja

f = ja.ProfileFunction.identity()
iv = ja.simonzhu_interval(f)
print(f"zero-exponent interval for f(x) = x: [{iv.lo:g}, {iv.hi:g}]")

N = 10**6
E = np.array([-0.5, 0.5, 1.5, 2.5, 3.0, 4.0])
J = ja.nrho(f, 0.5)
direct = ja.lyapunov_finite(J, E, N)
avg = np.array([ja.average_r0(f, e, "lyapunov") for e in E])
print(f"\n{'E':>5} {'L_N (rho=1/2)':>14} {'average':>10}")
for e, d, a in zip(E, direct, avg):
    print(f"{e:5.2f} {d:14.5f} {a:10.5f}")

E2 = np.array([0.0, 1.0])
k = ja.ids_estimate(J, E2, 10**5)
kavg = [ja.average_r0(f, e, "ids") for e in E2]
print("\nintegrated density of states:")
for e, a, b in zip(E2, k, kavg):
    print(f"  E={e:g}: k_N = {a:.5f}, average = {b:.5f}")
