"""Ergodic averages for the n^rho potentials.

For ``0 < rho < 1`` the translates of ``b(n) = f(n^rho mod 1)`` equidistribute
over the constant potentials ``f(alpha)``, ``alpha`` uniform, so the Lyapunov
exponent and the integrated density of states are averages of closed-form
constant-potential quantities.  For ``r < rho < r + 1`` the families are the
skew-shifts on the r-torus, which have no closed form; those averages are
estimated by Monte Carlo.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .eigen import ids_estimate
from .lattice import Coefficients
from .models import ProfileFunction, SkewShiftState, nrho, skewshift
from .transfer import lyapunov_finite


def gamma_const(c, z):
    """Lyapunov exponent of the constant potential ``c`` (a = 1).

    ``log|w + sqrt(w^2 - 1)|`` with ``w = (z - c)/2`` on the branch of modulus
    >= 1; exactly zero on the band ``|E - c| <= 2`` of the real axis.
    """
    w = (np.asarray(z, dtype=complex) - np.asarray(c, dtype=float)) / 2.0
    root = np.sqrt(w * w - 1.0)
    g = np.log(np.maximum(np.abs(w + root), np.abs(w - root)))
    in_band = (w.imag == 0) & (np.abs(w.real) <= 1.0)
    g = np.where(in_band, 0.0, np.maximum(g, 0.0))
    return float(g) if g.ndim == 0 else g


def k_const(c, E):
    """Integrated density of states of the constant potential ``c``."""
    x = np.clip(-(np.asarray(E, dtype=float) - np.asarray(c, dtype=float)) / 2.0, -1.0, 1.0)
    k = np.arccos(x) / np.pi
    return float(k) if k.ndim == 0 else k


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __contains__(self, E):
        return self.lo <= E <= self.hi


def simonzhu_interval(f: ProfileFunction) -> Interval:
    """``[-2 + max f, 2 + min f]``, where every constant family ``f(alpha)`` has zero exponent.

    Empty (``lo > hi``) when the range of ``f`` exceeds 4.
    """
    return Interval(-2.0 + f.fmax, 2.0 + f.fmin)


def _midpoint(f, E, quantity, nodes):
    alpha = (np.arange(nodes) + 0.5) / nodes
    c = f(alpha)
    if quantity == "lyapunov":
        vals = gamma_const(c, complex(E))
    elif quantity == "ids":
        vals = k_const(c, float(np.real(E)))
    else:
        raise ValueError(f"quantity must be 'lyapunov' or 'ids', got {quantity!r}")
    return float(np.mean(vals))


def average_r0(f: ProfileFunction, E, quantity: str = "lyapunov", nodes: int = 4096,
               full_output: bool = False):
    """``integral_0^1 q(f(alpha), E) d alpha`` for ``q`` = :func:`gamma_const` or :func:`k_const`.

    Composite midpoint rule (the integrand has kinks where ``|E - f(alpha)| = 2``).
    With ``full_output`` also returns the node-doubling difference as an
    error estimate.
    """
    if nodes < 2:
        raise ValueError("need at least 2 nodes")
    value = _midpoint(f, E, quantity, nodes)
    if not full_output:
        return value
    return value, abs(_midpoint(f, E, quantity, 2 * nodes) - value)


class MCEstimate(NamedTuple):
    mean: float
    stderr: float
    samples: np.ndarray


def average_skew_mc(f: ProfileFunction, E, r: int, n_alpha: int = 64, n_omega: int = 4,
                    N_inner: int = 100_000, seed: int = 0) -> MCEstimate:
    """Monte Carlo estimate of ``integral_0^1 gamma_{alpha}(E) d alpha`` for the r-torus skew-shift.

    Draws ``n_alpha`` rotation numbers and ``n_omega`` starting points each,
    and estimates every exponent with :func:`lyapunov_finite` at length
    ``N_inner``.  The standard error is the delete-one-alpha jackknife.  Each
    alpha draws from its own child seed, so results do not depend on
    evaluation order.
    """
    if r < 1:
        raise ValueError("Monte Carlo averaging needs r >= 1; use average_r0 for r = 0")
    if n_alpha < 2 or n_omega < 1:
        raise ValueError("need n_alpha >= 2 and n_omega >= 1")
    children = np.random.SeedSequence(seed).spawn(n_alpha)
    samples = np.empty((n_alpha, n_omega))
    for i, ss in enumerate(children):
        rng = np.random.default_rng(ss)
        alpha = float(rng.random())
        for j in range(n_omega):
            omega = tuple(rng.random(r))
            J = skewshift(f, SkewShiftState(r, alpha, omega))
            samples[i, j] = lyapunov_finite(J, E, N_inner)
    per_alpha = samples.mean(axis=1)
    g = n_alpha
    loo = (per_alpha.sum() - per_alpha) / (g - 1)
    se = float(np.sqrt((g - 1) / g * np.sum((loo - loo.mean()) ** 2)))
    return MCEstimate(float(per_alpha.mean()), se, samples)


@dataclass
class AverageReport:
    """Finite-N direct values next to the ergodic average, on an energy grid."""

    E: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    params: dict = field(default_factory=dict)
    rhs_error: np.ndarray | None = None

    @property
    def gap(self) -> np.ndarray:
        return np.abs(np.asarray(self.lhs) - np.asarray(self.rhs))


def compare_average(f: ProfileFunction, rho: float, E, quantity: str = "lyapunov",
                    N: int = 1_000_000, nodes: int = 4096, n_alpha: int = 64,
                    n_omega: int = 4, N_inner: int = 100_000, seed: int = 0,
                    J: Coefficients | None = None) -> AverageReport:
    """Direct exponent (or IDS) of ``f(n^rho mod 1)`` against its ergodic average.

    ``r = floor(rho)``: r = 0 uses the closed-form average, r >= 1 the
    skew-shift Monte Carlo (Lyapunov exponent only).
    """
    E = np.atleast_1d(np.asarray(E, dtype=float))
    J = nrho(f, rho) if J is None else J
    r = int(np.floor(rho))
    params = {"rho": rho, "r": r, "N": N, "quantity": quantity}
    if quantity == "lyapunov":
        lhs = np.atleast_1d(lyapunov_finite(J, E, N))
    elif quantity == "ids":
        lhs = np.atleast_1d(ids_estimate(J, E, N))
    else:
        raise ValueError(f"quantity must be 'lyapunov' or 'ids', got {quantity!r}")
    if r == 0:
        pairs = [average_r0(f, e, quantity, nodes, full_output=True) for e in E]
        rhs = np.array([p[0] for p in pairs])
        err = np.array([p[1] for p in pairs])
        params["nodes"] = nodes
    else:
        if quantity != "lyapunov":
            raise ValueError("skew-shift averaging is implemented for the Lyapunov exponent only")
        ests = [average_skew_mc(f, e, r, n_alpha, n_omega, N_inner, seed) for e in E]
        rhs = np.array([m.mean for m in ests])
        err = np.array([m.stderr for m in ests])
        params.update(n_alpha=n_alpha, n_omega=n_omega, N_inner=N_inner, seed=seed)
    return AverageReport(E, lhs, rhs, params, err)
