"""Free Laplacian against a random potential.

The free operator has zero Lyapunov exponent on its spectrum [-2, 2] and
arccosh(|E|/2) outside.  An Anderson potential makes the exponent positive at
every energy.  Off the real axis the finite-volume exponent equals the log
potential of the eigenvalue counting measure (Thouless formula), which we
check at one height.
"""
import numpy as np

import jacobiavg as ja

N = 10_000
E = np.linspace(-4, 4, 9)

L_free = ja.lyapunov_finite(ja.free(), E, N)
exact = np.arccosh(np.maximum(np.abs(E) / 2, 1.0))
L_and = ja.lyapunov_finite(ja.anderson(42, 1.0), E, N)

print(f"{'E':>6} {'free L_N':>10} {'exact':>10} {'Anderson L_N':>13}")
for row in zip(E, L_free, exact, L_and):
    print("{:6.2f} {:10.5f} {:10.5f} {:13.5f}".format(*row))

# Thouless formula at z = E + 0.5i
z = E + 0.5j
J = ja.anderson(42, 1.0)
gap = np.abs(ja.lyapunov_finite(J, z, N) - ja.thouless_rhs(J, z, N))
print(f"\nThouless formula at height 0.5, N={N}: max gap {gap.max():.2e}")
