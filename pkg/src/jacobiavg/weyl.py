"""Weyl-Titchmarsh m-functions and the m-function route to the Lyapunov exponent.

``m_+(z, J) = <delta_0, (J_+ - z)^{-1} delta_0>`` with ``J_+`` the restriction
to ``{0, 1, 2, ...}``.  It is computed by the continued fraction

    m^(k) = 1 / (b(k) - z - a(k)^2 m^(k+1)),

truncated with a zero tail (a Dirichlet box) whose depth is doubled until
two successive truncations agree.  All routines need ``Im z > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .lattice import Coefficients, as_energy, reflect

MAX_DEPTH = 1_000_000
_START_DEPTH = 64


class MFunctionError(ArithmeticError):
    """The continued fraction did not settle within the depth cap."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class MFunctionValue:
    value: complex
    method: str
    depth: int
    est_error: float

    def __complex__(self):
        return self.value


@njit(cache=True, nogil=True)
def _cf_sweep(a, b, z, out):
    """Backward sweep; out[k] is the truncated m-function of the k-th translate."""
    m = 0j
    for k in range(b.size - 1, -1, -1):
        m = 1.0 / (b[k] - z - a[k] * a[k] * m)
        out[k] = m


@njit(cache=True, nogil=True)
def _cf_value(a, b, z):
    m = 0j
    for k in range(b.size - 1, -1, -1):
        m = 1.0 / (b[k] - z - a[k] * a[k] * m)
    return m


@njit(cache=True, nogil=True)
def _box_forward(a, b, z):
    """Last diagonal resolvent entry of J_[0, N] by forward elimination."""
    g = 1.0 / (b[0] - z)
    for k in range(1, b.size):
        g = 1.0 / (b[k] - z - a[k - 1] * a[k - 1] * g)
    return g


def _box_resolvent_m(J: Coefficients, z: complex, depth: int) -> complex:
    a, b = J.block(0, depth)
    ab = np.zeros((3, depth), dtype=complex)
    ab[0, 1:] = a[:-1]
    ab[1] = b - z
    ab[2, :-1] = a[:-1]
    rhs = np.zeros(depth, dtype=complex)
    rhs[0] = 1.0
    return complex(solve_banded((1, 1), ab, rhs)[0])


def m_plus(J: Coefficients, z, tol: float = 1e-12, *,
           method: str = "continued-fraction", max_depth: int = MAX_DEPTH) -> MFunctionValue:
    """Half-line m-function by adaptive depth doubling.

    ``method="box-resolvent"`` instead solves ``(J_[0,D-1] - z) u = delta_0``
    with a banded solver; both truncate at the same boxes, through different
    arithmetic.
    """
    z = as_energy(z, strict=True)
    if method == "continued-fraction":
        def evaluate(depth):
            a, b = J.block(0, depth)
            return complex(_cf_value(a, b, z))
    elif method == "box-resolvent":
        def evaluate(depth):
            return _box_resolvent_m(J, z, depth)
    else:
        raise ValueError(f"unknown method {method!r}")

    depth = _START_DEPTH
    prev = evaluate(depth)
    while True:
        nxt_depth = min(2 * depth, max_depth)
        cur = evaluate(nxt_depth)
        err = abs(cur - prev)
        if err < tol:
            return MFunctionValue(cur, method, nxt_depth, err)
        if nxt_depth >= max_depth:
            raise MFunctionError(
                f"m-function not converged at depth {max_depth} (diff {err:.3g})",
                MFunctionValue(cur, method, nxt_depth, err))
        depth, prev = nxt_depth, cur


def m_minus(J: Coefficients, z, tol: float = 1e-12, **kw) -> MFunctionValue:
    """``<delta_{-1}, (J_- - z)^{-1} delta_{-1}>`` for the restriction to ``{.., -2, -1}``."""
    return m_plus(reflect(J), z, tol, **kw)


def box_m(J: Coefficients, z, N: int) -> complex:
    """``m_N(z) = <delta_N, (J_[0,N] - z)^{-1} delta_N>``.

    Satisfies ``c(z, N+1) / c(z, N) = -1 / (a(N) m_N(z))``.
    """
    z = as_energy(z, strict=True)
    if N < 0:
        raise ValueError("N must be >= 0")
    a, b = J.block(0, N + 1)
    return complex(_box_forward(a, b, z))


def m_plus_shifts(J: Coefficients, z, N: int, tol: float = 1e-12,
                  max_depth: int = MAX_DEPTH):
    """``m_+(z, J^(n))`` for ``n = 0 .. N-1`` from one backward sweep.

    The sweep starts ``D`` sites beyond ``N``; ``D`` doubles until the
    logarithms of all N values move by less than ``tol``.  Returns the values
    and the final ``D``.
    """
    z = as_energy(z, strict=True)
    depth = _START_DEPTH
    prev = None
    while True:
        a, b = J.block(0, N + depth)
        out = np.empty(N + depth, dtype=complex)
        _cf_sweep(a, b, z, out)
        cur = out[:N]
        if prev is not None:
            err = float(np.max(np.abs(np.log(cur / prev))))
            if err < tol:
                return cur, depth
            if depth >= max_depth:
                raise MFunctionError(
                    f"shifted m-functions not converged at depth {max_depth}",
                    MFunctionValue(complex(cur[0]), "continued-fraction", depth, err))
        prev = cur
        depth = min(2 * depth, max_depth)


def lyap_via_m(J: Coefficients, z, N: int, tol: float = 1e-12) -> float:
    """``-(1/N) sum_{n<N} [log a(n) + log|m_+(z, J^(n))|]``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    m, _ = m_plus_shifts(J, z, N, tol)
    a, _ = J.block(0, N)
    return float(-np.mean(np.log(a)) - np.mean(np.log(np.abs(m))))


@dataclass(frozen=True)
class UPlusReport:
    """Comparison of the decaying solution with its product expansion at site N.

    ``sign`` is ``u_+(N)`` divided by ``prod_{n<=N} a(n-1) m_+(z, J^(n))``,
    rounded to +-1; the expansion predicts ``(-1)^(N+1)``.
    """

    N: int
    u_abs: float
    product_abs: float
    rel_error: float
    sign: int
    box: int


def u_plus_check(J: Coefficients, z, N: int, tol: float = 1e-13) -> UPlusReport:
    """Check ``|u_+(z,N)| = prod_{n=0}^{N} a(n-1) |m_+(z, J^(n))|``.

    ``u_+`` solves ``J u = z u`` on ``n >= 0`` with ``u(-1) = 1`` and decays;
    it is computed on a box ``[0, M]`` with ``u(M+1) = 0`` by a banded solve.
    """
    z = as_energy(z, strict=True)
    if N < 0:
        raise ValueError("N must be >= 0")
    m, depth = m_plus_shifts(J, z, N + 1, tol)
    M = N + 1 + 2 * depth
    a, b = J.block(-1, M + 1)       # a[k] = a(k-1), b[k] = b(k-1)
    a_left, a_box, b_box = a[0], a[1:], b[1:]
    ab = np.zeros((3, M), dtype=complex)
    ab[0, 1:] = a_box[:-1]
    ab[1] = b_box - z
    ab[2, :-1] = a_box[:-1]
    rhs = np.zeros(M, dtype=complex)
    rhs[0] = -a_left
    u = solve_banded((1, 1), ab, rhs)
    factors = a[: N + 1] * m          # a(n-1) m_+(z, J^(n))
    prod = complex(np.prod(factors))
    u_N = complex(u[N])
    ratio = u_N / prod
    return UPlusReport(int(N), abs(u_N), abs(prod), abs(abs(u_N) / abs(prod) - 1.0),
                       1 if ratio.real >= 0 else -1, int(M))


def reflectionless_defect(J: Coefficients, E: float, eta: float, tol: float = 1e-10) -> float:
    """``|m_+(z) + conj(M_-(z))|`` at ``z = E + i eta``, ``M_- = -1 / (a(-1)^2 m_-)``.

    ``M_-`` is the Herglotz function of the left half-line seen across the
    bond ``(-1, 0)``; the whole-line Green function at 0 is purely imaginary
    exactly when ``m_+ = -conj(M_-)``.  For the free operator the defect is
    ``O(eta)`` everywhere in ``(-2, 2)``.

    A heuristic: small values at small ``eta`` are suggestive of reflectionless
    behaviour near ``E``; nothing is claimed about the limit ``eta -> 0``.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    z = complex(E, eta)
    mp = m_plus(J, z, tol).value
    mm = m_minus(J, z, tol).value
    a_left = float(J.a(-1))
    M = -1.0 / (a_left * a_left * mm)
    return abs(mp + np.conj(M))
