"""Transfer matrices, renormalized products and the cosine/sine solutions.

Sign convention: solutions of ``J u = z u`` satisfy

    a(n) u(n+1) = (z - b(n)) u(n) - a(n-1) u(n-1),

so the one-step matrix acting on ``(u(n), a(n-1) u(n-1))`` is

    M(z, n) = (1 / a(n)) [[z - b(n), -1], [a(n)^2, 0]],     det M = 1.

With this matrix the product over ``n = N-1 .. 0`` has first row
``(c(z,N), s(z,N))`` and second row ``a(N-1) (c(z,N-1), s(z,N-1))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import Coefficients, as_energy


@njit(cache=True, nogil=True)
def _product_kernel(a, b, zs, mats, logscale):
    for iz in range(zs.size):
        z = zs[iz]
        m00 = 1.0 + 0j
        m01 = 0j
        m10 = 0j
        m11 = 1.0 + 0j
        acc = 0.0
        for n in range(a.size):
            inv = 1.0 / a[n]
            t = (z - b[n]) * inv
            # rows of M(z, n) @ P
            n00 = t * m00 - inv * m10
            n01 = t * m01 - inv * m11
            n10 = a[n] * m00
            n11 = a[n] * m01
            nrm = np.sqrt(n00.real ** 2 + n00.imag ** 2 + n01.real ** 2
                          + n01.imag ** 2 + n10.real ** 2 + n10.imag ** 2
                          + n11.real ** 2 + n11.imag ** 2)
            acc += np.log(nrm)
            s = 1.0 / nrm
            m00 = n00 * s
            m01 = n01 * s
            m10 = n10 * s
            m11 = n11 * s
        mats[iz, 0, 0] = m00
        mats[iz, 0, 1] = m01
        mats[iz, 1, 0] = m10
        mats[iz, 1, 1] = m11
        logscale[iz] = acc


@njit(cache=True, nogil=True)
def _recurrence_kernel(a, b, a_left, z, u0, um1):
    """Three-term recurrence from (u(0), u(-1)) up to (u(N), u(N-1)), log-scaled."""
    cur = u0
    prev = um1
    a_prev = a_left
    acc = 0.0
    for n in range(a.size):
        nxt = ((z - b[n]) * cur - a_prev * prev) / a[n]
        prev = cur
        cur = nxt
        a_prev = a[n]
        big = max(abs(cur), abs(prev))
        if big > 1e100 or (big < 1e-100 and big > 0.0):
            cur = cur / big
            prev = prev / big
            acc += np.log(big)
    return cur, prev, acc


def step_matrix(z, a: float, b: float) -> np.ndarray:
    """One-step transfer matrix ``(1/a) [[z - b, -1], [a^2, 0]]``."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    z = complex(z)
    return np.array([[(z - b) / a, -1.0 / a], [a, 0.0]], dtype=complex)


@dataclass(frozen=True)
class ScaledProduct:
    """Transfer product stored as ``exp(logscale) * mat`` with ``||mat||_F = 1``."""

    mat: np.ndarray
    logscale: float
    N: int

    def value(self) -> np.ndarray:
        """The unscaled product (overflows for long products)."""
        return np.exp(self.logscale) * self.mat

    def log_norm(self) -> float:
        """log of the Frobenius norm of the product."""
        return self.logscale + float(np.log(np.linalg.norm(self.mat)))

    def det(self) -> complex:
        m = self.mat
        return complex((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) * np.exp(2 * self.logscale))


def _energies(z):
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    for zz in arr.ravel():
        as_energy(zz)
    return arr


def _products(J: Coefficients, zs: np.ndarray, N: int):
    if N < 1:
        raise ValueError("N must be >= 1")
    a, b = J.block(0, N)
    flat = np.ascontiguousarray(zs.ravel())
    mats = np.empty((flat.size, 2, 2), dtype=complex)
    logscale = np.empty(flat.size)
    _product_kernel(a, b, flat, mats, logscale)
    return mats, logscale


def transfer_product(J: Coefficients, z, N: int) -> ScaledProduct:
    """Renormalized product ``M(z, N-1) ... M(z, 0)``."""
    zs = _energies(as_energy(z))
    mats, logscale = _products(J, zs, N)
    return ScaledProduct(mats[0], float(logscale[0]), int(N))


def lyapunov_finite(J: Coefficients, z, N: int):
    """Finite-volume Lyapunov exponent ``(1/N) log ||M(z,N-1) ... M(z,0)||_F``.

    ``z`` may be an array (an energy grid); the coefficients are evaluated
    once for the whole grid.  Real energies are allowed.  The Frobenius norm
    is within a factor sqrt(2) of the operator norm, i.e. within
    ``log(2)/(2N)`` after normalization.
    """
    zs = _energies(z)
    _, logscale = _products(J, zs, N)
    out = (logscale / N).reshape(np.shape(z))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CosSin:
    """Cosine and sine solutions at sites N and N-1, scaled by ``exp(log_c)``, ``exp(log_s)``.

    ``c(z,0) = 1, c(z,-1) = 0`` and ``s(z,0) = 0, a(-1) s(z,-1) = 1``.
    """

    N: int
    c: complex
    c_prev: complex
    log_c: float
    s: complex
    s_prev: complex
    log_s: float

    def log_abs_c(self) -> float:
        return self.log_c + float(np.log(abs(self.c)))

    def log_abs_s(self) -> float:
        return self.log_s + float(np.log(abs(self.s)))

    def values(self):
        """Unscaled ``(c(N), s(N), c(N-1), s(N-1))``; may overflow."""
        ec, es = np.exp(self.log_c), np.exp(self.log_s)
        return self.c * ec, self.s * es, self.c_prev * ec, self.s_prev * es


def cosine_sine(J: Coefficients, z, N: int) -> CosSin:
    """Run the three-term recurrence to site N for both initial conditions."""
    z = as_energy(z)
    if N < 1:
        raise ValueError("N must be >= 1")
    a, b = J.block(0, N)
    a_left = float(J.a(-1))
    c, c_prev, log_c = _recurrence_kernel(a, b, a_left, z, 1.0 + 0j, 0j)
    s, s_prev, log_s = _recurrence_kernel(a, b, a_left, z, 0j, (1.0 / a_left) + 0j)
    return CosSin(int(N), complex(c), complex(c_prev), float(log_c),
                  complex(s), complex(s_prev), float(log_s))
