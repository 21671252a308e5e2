"""Right limits seen through empirical measures of translates.

A sparse potential (bumps at the squares) is free on all but a vanishing
fraction of sites, so the translates converge in probability to the free
operator.  A periodic operator has an exact limit measure with one atom per
phase, which the empirical measure reproduces up to rounding once N is a
multiple of the period.
"""
import jacobiavg as ja

sp = ja.sparse_squares(1.0)
for N in (10**3, 10**4, 10**5, 10**6):
    print(f"N={N:>8}: fraction of sites off free = {ja.drr_statistic(sp, N, 0.5):.5f}")

print("decaying 5/(1+n)^0.5, eps=0.1, N=1e6:",
      ja.drr_statistic(ja.decaying(5.0, 0.5), 10**6, 0.1))
print("sparse -> free torus, K=8, eps=0.5:",
      ja.convergence_in_probability(sp, "free_torus", 10**5, 0.5, 8))

P = ja.periodic([0.5, -1.0, 1.5])
d = ja.cylinder_distance(ja.empirical_measure(P, 30_000, 4), ja.periodic_measure(P, 3, 4))
print(f"period-3 empirical vs exact measure: {d:.1e}")
