"""Weyl m-functions by continued fraction.

For the free operator m(z) solves m = 1/(-z - m) on the upper half plane; at
z = i that is i (sqrt 5 - 1)/2.  The m-functions of the half-lines also give
the Lyapunov exponent through the product of |m| along the orbit, and the
reflectionless defect is small on the spectrum of the free operator.
"""
import numpy as np

import jacobiavg as ja

J = ja.free()
m = ja.m_plus(J, 1j)
print(f"m_+(free, i) = {m.value.imag:.15f}i  (exact {(np.sqrt(5) - 1) / 2:.15f}i)")

for z in (0.5 + 0.1j, 3.0 + 0.1j, -1.0 + 1.0j):
    print(f"z={z}: m_+ = {ja.m_plus(J, z).value:.6f}, m_- = {ja.m_minus(J, z).value:.6f}")

A = ja.anderson(42, 1.0)
z = 0.3 + 0.5j
print(f"\nAnderson, z={z}: L via m = {ja.lyap_via_m(A, z, 10_000):.6f}, "
      f"L_N = {ja.lyapunov_finite(A, z, 10_000):.6f}")

for E in (0.0, 1.0, 1.9):
    print(f"reflectionless defect, free, E={E} + 1e-3 i: {ja.reflectionless_defect(J, E, 1e-3):.2e}")
