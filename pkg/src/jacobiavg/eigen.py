"""Sturm-sequence counting, bisection eigenvalues and densities of states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import Coefficients, SingularityError, Window, extract_window

_SAFE_MIN = np.finfo(np.float64).tiny
_ATOM_GUARD = 1e-14


_LANES = 64


@njit(cache=True, nogil=True)
def _count_lanes(d, e2, xs, pivmin, out):
    """Sturm counts for many shifts at once; the lane loop has no dependencies."""
    q = np.empty(_LANES)
    cnt = np.empty(_LANES, dtype=np.int64)
    for s in range(0, xs.size, _LANES):
        w = min(_LANES, xs.size - s)
        for i in range(w):
            v = d[0] - xs[s + i]
            v = v if abs(v) >= pivmin else -pivmin
            q[i] = v
            cnt[i] = 1 if v < 0.0 else 0
        for k in range(1, d.size):
            dk = d[k]
            ek = e2[k - 1]
            for i in range(w):
                v = (dk - xs[s + i]) - ek / q[i]
                v = v if abs(v) >= pivmin else -pivmin
                q[i] = v
                cnt[i] += 1 if v < 0.0 else 0
        for i in range(w):
            out[s + i] = cnt[i]


def _bisect_all(d, e2, lo0, hi0, tol, pivmin):
    L = d.size
    # one pass of counts on a uniform grid isolates most eigenvalues
    grid = np.linspace(lo0, hi0, max(L, 2) + 1)
    gc = np.empty(grid.size, dtype=np.int64)
    _count_lanes(d, e2, grid, pivmin, gc)
    gc[0], gc[-1] = 0, L
    gc = np.maximum.accumulate(gc)
    j = np.arange(L)
    cell = np.searchsorted(gc, j, side="right") - 1
    lo = grid[cell].copy()
    hi = grid[np.minimum(cell + 1, grid.size - 1)].copy()
    iters = int(np.ceil(np.log2(max(np.max(hi - lo), tol) / tol)))
    counts = np.empty(L, dtype=np.int64)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        _count_lanes(d, e2, mid, pivmin, counts)
        above = counts > j
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def _sturm_data(W: Window):
    d = np.ascontiguousarray(W.diag)
    e2 = np.ascontiguousarray(W.offdiag) ** 2
    pivmin = _SAFE_MIN * max(1.0, float(e2.max()) if e2.size else 1.0)
    return d, e2, pivmin


def gershgorin(W: Window):
    """Interval containing the spectrum of the window."""
    off = np.zeros(W.length)
    off[:-1] += W.offdiag
    off[1:] += W.offdiag
    return float(np.min(W.diag - off)), float(np.max(W.diag + off))


def sturm_count(W: Window, E):
    """Number of eigenvalues of ``W`` strictly below ``E`` (scalar or array)."""
    d, e2, pivmin = _sturm_data(W)
    xs = np.atleast_1d(np.asarray(E, dtype=np.float64))
    out = np.empty(xs.size, dtype=np.int64)
    _count_lanes(d, e2, np.ascontiguousarray(xs.ravel()), pivmin, out)
    out = out.reshape(np.shape(E))
    return int(out) if out.ndim == 0 else out


def eigenvalues_bisect(W: Window, tol: float) -> np.ndarray:
    """All eigenvalues of ``W``, ascending, each to absolute accuracy ``tol``.

    Bisection on Sturm counts inside the Gershgorin enclosure.  A first pass
    of counts on a uniform grid of ``L+1`` points brackets each eigenvalue;
    all brackets are then halved in lockstep, which lets the independent
    recurrences pipeline.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    d, e2, pivmin = _sturm_data(W)
    lo, hi = gershgorin(W)
    return _bisect_all(d, e2, lo - tol, hi + tol, tol, pivmin)


@dataclass(frozen=True)
class DOSMeasure:
    """Normalized counting measure on the eigenvalues of a box restriction."""

    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def weight(self) -> float:
        return 1.0 / self.eigenvalues.size

    def cdf(self, E):
        """Mass of ``(-inf, E)``."""
        return np.searchsorted(self.eigenvalues, E, side="left") / self.n


def dos_measure(J: Coefficients, N: int, tol: float | None = None) -> DOSMeasure:
    """Density of states measure of ``J`` restricted to ``[0, N-1]``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    tol = 1e-10 * J.c0 if tol is None else tol
    return DOSMeasure(eigenvalues_bisect(extract_window(J, 0, N), tol))


def ids_estimate(J: Coefficients, E, N: int):
    """Fraction of eigenvalues of ``J_[0, N-1]`` below ``E`` (one Sturm pass per E)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return sturm_count(extract_window(J, 0, N), E) / N


def log_potential(nu: DOSMeasure, z):
    """``integral log|t - z| d nu(t)`` for scalar or array ``z``.

    On the real axis an energy within 1e-14 of an atom raises
    :class:`SingularityError` instead of being regularized.
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    lam = nu.eigenvalues
    out = np.empty(zs.size)
    for i, zz in enumerate(zs.ravel()):
        if zz.imag < 0:
            raise ValueError("energy must satisfy Im z >= 0")
        if zz.imag == 0:
            k = np.searchsorted(lam, zz.real)
            near = lam[max(k - 1, 0):k + 1]
            if near.size and np.min(np.abs(near - zz.real)) <= _ATOM_GUARD:
                raise SingularityError(f"E={zz.real!r} coincides with an eigenvalue")
        out[i] = np.mean(np.log(np.abs(lam - zz)))
    out = out.reshape(np.shape(z))
    return float(out) if out.ndim == 0 else out


def thouless_rhs(J: Coefficients, z, N: int, tol: float | None = None):
    """``integral log|t - z| d nu_N - (1/N) sum_{j<N} log a(j)``.

    Equals ``(1/N) log|c(z, N)|`` identically, since ``c(z, N) prod a(j)`` is
    the characteristic polynomial of ``J_[0, N-1]`` at ``z``.
    """
    nu = dos_measure(J, N, tol)
    a, _ = J.block(0, N)
    return log_potential(nu, z) - float(np.mean(np.log(a)))
