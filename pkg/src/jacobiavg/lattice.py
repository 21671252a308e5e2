"""Jacobi operators on the two-sided lattice.

A Jacobi operator acts on sequences indexed by the integers as

    (J u)(n) = a(n) u(n+1) + b(n) u(n) + a(n-1) u(n-1)

with ``1/c0 <= a(n) <= c0`` and ``|b(n)| <= c0``.  Operators are stored as
closed-form coefficient rules, never as arrays, so windows anywhere on the
lattice can be materialized in O(length).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Rule = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]

# windows longer than this are not kept in the per-operator cache
_CACHE_MAX_LENGTH = 4_000_000
_CACHE_SLOTS = 4


class BoundError(ValueError):
    """Coefficients leave the box 1/c0 <= a <= c0, -c0 <= b <= c0."""


class SingularityError(ArithmeticError):
    """A logarithmic singularity was hit (energy on an eigenvalue)."""


def as_energy(z, *, strict: bool = False) -> complex:
    """Validate a spectral parameter ``z = E + i*eta`` with ``eta >= 0``.

    With ``strict=True`` the real axis is rejected as well, which is what the
    resolvent-based routines need.
    """
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError(f"energy must be finite, got {z!r}")
    if z.imag < 0:
        raise ValueError(f"energy must satisfy Im z >= 0, got {z!r}")
    if strict and z.imag == 0:
        raise ValueError(f"operation requires Im z > 0, got {z!r}")
    return z


@dataclass(frozen=True, eq=False)
class Coefficients:
    """A point of the space of bounded Jacobi operators.

    Parameters
    ----------
    rule : callable
        Vectorized map from an ``int64`` array of lattice sites to the pair
        ``(a, b)`` of float arrays.  Must be deterministic.
    c0 : float
        Bound constant, ``c0 > 1``.
    descriptor : dict
        Serializable model tag and parameters.
    offset : int
        Accumulated shift; the operator's site ``n`` is the rule's site
        ``n + offset``.
    """

    rule: Rule
    c0: float
    descriptor: dict = field(default_factory=dict)
    offset: int = 0

    def __post_init__(self):
        if not self.c0 > 1:
            raise ValueError(f"c0 must exceed 1, got {self.c0}")
        object.__setattr__(self, "_cache", {})

    def __call__(self, n):
        """Return ``(a(n), b(n))`` for an integer or an integer array."""
        n = np.asarray(n, dtype=np.int64)
        a, b = self.rule(n + np.int64(self.offset))
        a = np.broadcast_to(np.asarray(a, dtype=np.float64), n.shape)
        b = np.broadcast_to(np.asarray(b, dtype=np.float64), n.shape)
        if __debug__:
            self._check(a, b)
        return a, b

    def a(self, n):
        return self(n)[0]

    def b(self, n):
        return self(n)[1]

    def block(self, n0: int, length: int):
        """Coefficients on the contiguous sites ``n0 .. n0+length-1``.

        Returns read-only arrays; recent blocks are cached because sweeps
        over energy grids request the same block repeatedly.
        """
        n0, length = int(n0), int(length)
        if length < 0:
            raise ValueError("length must be nonnegative")
        key = (n0, length)
        cache = self._cache
        if key in cache:
            return cache[key]
        a, b = self(np.arange(n0, n0 + length, dtype=np.int64))
        a = np.array(a)
        b = np.array(b)
        a.setflags(write=False)
        b.setflags(write=False)
        if length <= _CACHE_MAX_LENGTH:
            if len(cache) >= _CACHE_SLOTS:
                cache.pop(next(iter(cache)))
            cache[key] = (a, b)
        return a, b

    def describe(self) -> dict:
        """Descriptor including the accumulated shift."""
        out = dict(self.descriptor)
        if self.offset:
            out["offset"] = self.offset
        return out

    def _check(self, a, b):
        c0 = self.c0
        if a.size and (np.min(a) < 1.0 / c0 or np.max(a) > c0):
            raise BoundError(f"a(n) outside [1/c0, c0] with c0={c0}")
        if b.size and np.max(np.abs(b)) > c0:
            raise BoundError(f"|b(n)| exceeds c0={c0}")


@dataclass(frozen=True, eq=False)
class Window:
    """Finite restriction ``J_[n0, n0+L-1]`` as a symmetric tridiagonal matrix."""

    offset: int
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=np.float64)
        offdiag = np.array(self.offdiag, dtype=np.float64)
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("a window needs at least one site")
        if offdiag.shape != (diag.size - 1,):
            raise ValueError("offdiag must have length len(diag) - 1")
        if np.any(offdiag <= 0):
            raise ValueError("off-diagonal entries must be positive")
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def length(self) -> int:
        return self.diag.size

    def __len__(self):
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.offdiag, 1)
                + np.diag(self.offdiag, -1))


def shift(J: Coefficients, n: int) -> Coefficients:
    """The translate ``S^{*n} J S^n``: site ``m`` of the result is site ``m+n`` of J."""
    return dataclasses.replace(J, offset=J.offset + int(n))


def reflect(J: Coefficients) -> Coefficients:
    """Mirror the left half-line ``{.., -2, -1}`` onto ``{0, 1, ..}``.

    ``b'(n) = b(-n-1)`` and ``a'(n) = a(-n-2)``, so the restriction of the
    result to the nonnegative sites is the restriction of J to the negative
    ones, read outward from ``-1``.
    """

    def rule(n):
        return J.a(-n - 2), J.b(-n - 1)

    return Coefficients(rule, J.c0, {"model": "reflect", "of": J.describe()})


def extract_window(J: Coefficients, n0: int, L: int) -> Window:
    """Materialize ``J`` on the sites ``n0 .. n0+L-1``."""
    if L < 1:
        raise ValueError("window length must be >= 1")
    a, b = J.block(n0, L)
    return Window(int(n0), b, a[: L - 1])


def metric_d(J1: Coefficients, J2: Coefficients, K: int) -> float:
    """Truncated product-topology metric.

    ``sum_{|n| <= K} 2^{-|n|} (|b1(n) - b2(n)| + |a1(n) - a2(n)|)``.  The
    omitted tail is at most ``8 * c0 * 2^{-K}`` for operators sharing ``c0``.
    """
    if K < 1:
        raise ValueError("truncation radius K must be >= 1")
    a1, b1 = J1.block(-K, 2 * K + 1)
    a2, b2 = J2.block(-K, 2 * K + 1)
    w = 0.5 ** np.abs(np.arange(-K, K + 1))
    return float(np.sum(w * (np.abs(b1 - b2) + np.abs(a1 - a2))))
