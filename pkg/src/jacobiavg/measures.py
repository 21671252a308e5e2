"""Empirical measures of translates, moment distances and convergence statistics.

Weak-* convergence of measures on the space of Jacobi operators is tested on
compactly supported functions, i.e. functions of the coefficients in a
window ``|j| <= K``.  Here that class is cut down further to normalized
monomials of degree <= 2 in the window entries; the resulting distance is a
pseudometric and only separates measures up to those moments.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .lattice import Coefficients, Window
from .models import free

_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Weighted atoms, each a window ``(a(n+j), b(n+j))_{|j| <= K}``.

    ``a`` and ``b`` have shape ``(atoms, 2K+1)``; ``weights`` sum to one.
    """

    K: int
    a: np.ndarray
    b: np.ndarray
    weights: np.ndarray
    c0: float

    @property
    def size(self) -> int:
        return self.weights.size

    def windows(self, offsets=None):
        """Atoms as :class:`Window` objects (sites ``n-K .. n+K``)."""
        offsets = range(self.size) if offsets is None else offsets
        return [Window(int(n) - self.K, self.b[i], self.a[i, :-1])
                for i, n in enumerate(offsets)]


def empirical_measure(J: Coefficients, N: int, K: int) -> EmpiricalMeasure:
    """``(1/N) sum_{n<N} delta_{J^(n)}`` seen through windows of radius K."""
    if N < 1 or K < 0:
        raise ValueError("need N >= 1 and K >= 0")
    a, b = J.block(-K, N + 2 * K)
    width = 2 * K + 1
    return EmpiricalMeasure(int(K), sliding_window_view(a, width),
                            sliding_window_view(b, width), np.full(N, 1.0 / N), J.c0)


def periodic_measure(J: Coefficients, period: int, K: int) -> EmpiricalMeasure:
    """The exact limit measure of a period-``period`` operator: ``period`` equal-weight atoms."""
    m = empirical_measure(J, period, K)
    a, b = J.block(period - K, 2 * K + 1)
    if not (np.array_equal(a, m.a[0]) and np.array_equal(b, m.b[0])):
        raise ValueError(f"operator is not {period}-periodic")
    return m


@dataclass(frozen=True)
class MomentVector:
    values: np.ndarray
    dictionary: str


def moment_vector(mu: EmpiricalMeasure, degree: int, c0: float | None = None) -> MomentVector:
    """Integrals of the normalized monomials of degree ``1..degree``.

    Variables are ``a(j)/c0`` and ``b(j)/c0`` for ``|j| <= K`` (so every
    monomial is bounded by one); degree 2 adds all products ``x_i x_k`` with
    ``i <= k``.
    """
    if degree not in (1, 2):
        raise ValueError("degree must be 1 or 2")
    c0 = mu.c0 if c0 is None else c0
    nvar = 2 * (2 * mu.K + 1)
    first = np.zeros(nvar)
    second = np.zeros((nvar, nvar))
    # uniform weights: sum first and scale once, so that data on a dyadic grid
    # (periodic operators) gives moments exact up to a single rounding
    uniform = bool(np.all(mu.weights == mu.weights[0]))
    for s in range(0, mu.size, _CHUNK):
        X = np.hstack([mu.a[s:s + _CHUNK], mu.b[s:s + _CHUNK]]) / c0
        if uniform:
            first += X.sum(axis=0)
            if degree == 2:
                second += X.T @ X
        else:
            w = mu.weights[s:s + _CHUNK]
            first += w @ X
            if degree == 2:
                second += (X * w[:, None]).T @ X
    if uniform:
        first /= mu.size
        second /= mu.size
    vals = first
    if degree == 2:
        iu = np.triu_indices(nvar)
        vals = np.concatenate([first, second[iu]])
    return MomentVector(vals, f"G(K={mu.K},degree={degree})")


def cylinder_distance(m1: EmpiricalMeasure, m2: EmpiricalMeasure, degree: int = 2) -> float:
    """Largest gap between corresponding dictionary moments of two measures."""
    if m1.K != m2.K:
        raise ValueError(f"window radii differ: {m1.K} vs {m2.K}")
    c0 = max(m1.c0, m2.c0)
    v1 = moment_vector(m1, degree, c0).values
    v2 = moment_vector(m2, degree, c0).values
    return float(np.max(np.abs(v1 - v2)))


def convergence_in_probability(J: Coefficients, target, N: int, eps: float, K: int) -> float:
    """``(1/N) #{1 <= n <= N : d_K(J^(n), A) >= eps}``.

    ``target`` is a Coefficients (a single operator) or ``"free_torus"``, the
    isospectral torus of [-2, 2], which is the free operator alone.
    ``d_K`` is the metric truncated to ``|j| <= K``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if N < 1 or K < 0:
        raise ValueError("need N >= 1 and K >= 0")
    if isinstance(target, str):
        if target != "free_torus":
            raise ValueError(f"unknown target {target!r}")
        target = free()
    ta, tb = target.block(-K, 2 * K + 1)
    w = 0.5 ** np.abs(np.arange(-K, K + 1))
    a, b = J.block(1 - K, N + 2 * K)
    A = sliding_window_view(a, 2 * K + 1)
    B = sliding_window_view(b, 2 * K + 1)
    hits = 0
    for s in range(0, N, _CHUNK):
        d = np.abs(A[s:s + _CHUNK] - ta) @ w + np.abs(B[s:s + _CHUNK] - tb) @ w
        hits += int(np.count_nonzero(d >= eps))
    return hits / N


def drr_statistic(J: Coefficients, N: int, eps: float) -> float:
    """``(1/N) #{1 <= n <= N : |a(n) - 1| > eps or |b(n)| > eps}``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    a, b = J.block(1, N)
    return int(np.count_nonzero((np.abs(a - 1.0) > eps) | (np.abs(b) > eps))) / N
