"""Potentials f(n^rho mod 1) with rho > 1 and the skew-shift.

For 1 < rho < 2 the translates of n^rho mod 1 equidistribute like orbits of
the skew-shift (x, y) -> (x + alpha, y + x) on the 2-torus, averaged over
alpha.  So the exponent should depend only on the integer part of rho.
Monte Carlo over skew-shift orbits gives the reference value.
"""
import numpy as np

import jacobiavg as ja

f = ja.parse_profile("trig:0,1")          # f(x) = cos(2 pi x)
E = np.array([3.0, 3.5])
N = 10**6

for rho in (1.3, 1.7):
    L = ja.lyapunov_finite(ja.nrho(f, rho), E, N)
    print(f"rho={rho}: L_N = {np.array2string(L, precision=5)}")

# fewer Monte Carlo samples than the acceptance run, for speed
for e in E:
    mc = ja.average_skew_mc(f, e, 1, n_alpha=16, n_omega=2, N_inner=50_000, seed=0)
    print(f"skew-shift average at E={e:g}: {mc.mean:.5f} +- {mc.stderr:.5f}")
