"""Coefficient families and sampling profiles.

All families have ``a == 1``.  Potentials ``b(n) = f(n^rho mod 1)`` and the
skew-shift families are the ones whose averages are studied in
:mod:`jacobiavg.averaging`; the rest form a test corpus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import gmpy2
import numpy as np
from scipy import optimize

from .lattice import BoundError, Coefficients

__all__ = [
    "ProfileFunction", "SkewShiftState", "free", "constant", "periodic",
    "anderson", "sparse_squares", "decaying", "nrho", "skewshift",
    "frac_power", "skew_orbit", "star_discrepancy", "discrepancy",
    "parse_profile", "parse_model",
]

# below this magnitude double-precision pow leaves < 2e-11 error in the
# fractional part; above it we switch to 128-bit MPFR
_POW_EXACT_LIMIT = 2.0 ** 16
_MPFR_BITS = 128
_TWO64 = 2 ** 64


# ---------------------------------------------------------------- profiles

@dataclass(frozen=True, eq=False)
class ProfileFunction:
    """Continuous sampling function on [0, 1], evaluated at ``x mod 1``.

    Either a trigonometric polynomial
    ``a0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)`` or a piecewise-linear
    table whose breakpoints run from 0 to 1.
    """

    kind: str
    coeffs: tuple = ()
    breakpoints: tuple = ()
    values: tuple = ()
    source: str | None = None
    fmax: float = field(init=False)
    fmin: float = field(init=False)

    def __post_init__(self):
        if self.kind == "trig":
            if not self.coeffs:
                raise ValueError("trig profile needs at least a0")
            if len(self.coeffs) % 2 == 0:
                # a trailing a_k without its b_k: the sine coefficient is 0
                object.__setattr__(self, "coeffs", tuple(self.coeffs) + (0.0,))
        elif self.kind == "table":
            x = np.asarray(self.breakpoints, dtype=float)
            if x.size < 2 or x.size != len(self.values):
                raise ValueError("table profile needs >= 2 breakpoints with values")
            if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
                raise ValueError("table breakpoints must increase from 0 to 1")
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        fmin, fmax = self._extrema()
        object.__setattr__(self, "fmin", fmin)
        object.__setattr__(self, "fmax", fmax)

    @classmethod
    def trig(cls, a0, *ab):
        return cls("trig", coeffs=tuple(float(c) for c in (a0, *ab)))

    @classmethod
    def table(cls, breakpoints, values, source=None):
        return cls("table", breakpoints=tuple(map(float, breakpoints)),
                   values=tuple(map(float, values)), source=source)

    @classmethod
    def identity(cls):
        """f(x) = x, with range [0, 1] and f(0) != f(1)."""
        return cls.table((0.0, 1.0), (0.0, 1.0))

    @classmethod
    def constant(cls, c):
        return cls.trig(c)

    def __call__(self, x):
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        if self.kind == "table":
            return np.interp(x, self.breakpoints, self.values)
        c = self.coeffs
        out = np.full_like(x, c[0])
        for k in range(1, (len(c) - 1) // 2 + 1):
            t = 2.0 * np.pi * k * x
            out = out + c[2 * k - 1] * np.cos(t) + c[2 * k] * np.sin(t)
        return out

    def describe(self) -> str:
        if self.kind == "trig":
            return "trig:" + ",".join(repr(c) for c in self.coeffs)
        if self.source is not None:
            return f"table:{self.source}"
        pts = ";".join(f"{x!r}:{y!r}" for x, y in zip(self.breakpoints, self.values))
        return f"table[{pts}]"

    def _extrema(self):
        if self.kind == "table":
            return float(min(self.values)), float(max(self.values))
        if len(self.coeffs) == 1:
            return self.coeffs[0], self.coeffs[0]
        # 2^16-point grid, then a bounded local search around the best node
        n = 2 ** 16
        grid = np.arange(n) / n
        y = self(grid)
        fmin = _polish(self, grid[np.argmin(y)], 1.0 / n, 1.0)
        fmax = -_polish(self, grid[np.argmax(y)], 1.0 / n, -1.0)
        return float(min(fmin, y.min())), float(max(fmax, y.max()))


def _polish(f, x0, h, sign):
    res = optimize.minimize_scalar(lambda x: sign * float(f(x)), bounds=(x0 - h, x0 + h),
                                   method="bounded", options={"xatol": 1e-12})
    return float(res.fun)


def load_table(path) -> ProfileFunction:
    """Two-column text file: breakpoint and value per line (``#`` comments)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns")
    return ProfileFunction.table(data[:, 0], data[:, 1], source=str(path))


# ------------------------------------------------------- basic coefficients

def _bound_c0(sup_b, c0):
    need = max(2.0, float(sup_b))
    if c0 is None:
        return need
    if c0 < need or c0 <= 1:
        raise BoundError(f"c0={c0} is smaller than the required bound {need}")
    return float(c0)


def _ones(n):
    return np.ones(np.shape(n))


def free(c0=None) -> Coefficients:
    """a = 1, b = 0."""
    return Coefficients(lambda n: (_ones(n), np.zeros(np.shape(n))),
                        _bound_c0(0.0, c0), {"model": "free"})


def constant(c: float, c0=None) -> Coefficients:
    c = float(c)
    return Coefficients(lambda n: (_ones(n), np.full(np.shape(n), c)),
                        _bound_c0(abs(c), c0), {"model": "constant", "c": c})


def periodic(values, c0=None) -> Coefficients:
    """b(n) = values[n mod p]."""
    v = np.array(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("periodic model needs at least one value")
    v.setflags(write=False)
    return Coefficients(lambda n: (_ones(n), v[np.mod(n, v.size)]),
                        _bound_c0(np.max(np.abs(v)), c0),
                        {"model": "periodic", "values": v.tolist()})


def _splitmix64(x):
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return x ^ (x >> np.uint64(31))


def counter_uniform(seed: int, n) -> np.ndarray:
    """Uniform [0, 1) variates keyed by ``(seed, n)``; evaluation order is irrelevant."""
    key = _splitmix64(np.uint64(int(seed) % _TWO64))
    with np.errstate(over="ignore"):
        x = _splitmix64(np.asarray(n, dtype=np.int64).astype(np.uint64) ^ key)
        x = _splitmix64(x + key)
    return (x >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def anderson(seed: int, coupling: float, c0=None) -> Coefficients:
    """i.i.d. potential, uniform on [-coupling, coupling]."""
    seed, coupling = int(seed), float(coupling)
    if coupling < 0:
        raise ValueError("coupling must be nonnegative")

    def rule(n):
        return _ones(n), coupling * (2.0 * counter_uniform(seed, n) - 1.0)

    return Coefficients(rule, _bound_c0(coupling, c0),
                        {"model": "anderson", "seed": seed, "coupling": coupling})


def _is_square(n):
    r = np.floor(np.sqrt(np.maximum(n, 0).astype(float))).astype(np.int64)
    # fix off-by-one from sqrt rounding
    r = np.where(r * r > n, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= n, r + 1, r)
    return (n >= 0) & (r * r == n)


def sparse_squares(height: float, c0=None) -> Coefficients:
    """b(n) = height at perfect squares n >= 0, zero elsewhere."""
    h = float(height)
    return Coefficients(lambda n: (_ones(n), np.where(_is_square(n), h, 0.0)),
                        _bound_c0(abs(h), c0), {"model": "sparse", "height": h})


def decaying(c: float, exponent: float, c0=None) -> Coefficients:
    """b(n) = c / (1 + |n|)^exponent."""
    c, p = float(c), float(exponent)
    if p < 0:
        raise ValueError("decay exponent must be nonnegative")

    def rule(n):
        return _ones(n), c / (1.0 + np.abs(n)) ** p

    return Coefficients(rule, _bound_c0(abs(c), c0),
                        {"model": "decaying", "c": c, "exponent": p})


# ------------------------------------------------------------ n^rho family

def frac_power(n, rho: float) -> np.ndarray:
    """Fractional part of ``|n|^rho``, accurate to ~1e-11 for ``|n|^rho < 2^70``.

    Small powers use libm ``pow``; larger ones are evaluated with 128-bit
    MPFR so the fractional part survives the loss of integer digits.
    """
    rho = float(rho)
    if not rho > 0:
        raise ValueError("rho must be positive")
    shape = np.shape(n)
    n = np.abs(np.asarray(n, dtype=np.int64)).ravel()
    x = n.astype(np.float64) ** rho
    out = x - np.floor(x)
    big = x > _POW_EXACT_LIMIT
    if np.any(big):
        with gmpy2.context(gmpy2.get_context(), precision=_MPFR_BITS):
            r = gmpy2.mpfr(rho)
            mpfr, frac = gmpy2.mpfr, gmpy2.frac
            out[big] = [float(frac(mpfr(int(k)) ** r)) for k in n[big]]
        out[out >= 1.0] = 0.0
    return out.reshape(shape)


def nrho(f: ProfileFunction, rho: float, c0=None) -> Coefficients:
    """a = 1, b(n) = f(n^rho mod 1); negative sites use ``|n|^rho``.

    Integer ``rho`` is accepted and gives the constant potential ``f(0)``.
    """
    rho = float(rho)
    if not rho > 0:
        raise ValueError("rho must be positive")

    def rule(n):
        return _ones(n), f(frac_power(n, rho))

    return Coefficients(rule, _bound_c0(max(abs(f.fmax), abs(f.fmin)), c0),
                        {"model": "nrho", "rho": rho, "profile": f.describe()})


# ------------------------------------------------------------- skew-shift

@dataclass(frozen=True)
class SkewShiftState:
    """Point of the r-torus plus the rotation number of the skew-shift."""

    r: int
    alpha: float
    omega: tuple = ()

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        omega = tuple(float(w) for w in self.omega) or (0.0,) * self.r
        if len(omega) != self.r:
            raise ValueError(f"omega must have {self.r} coordinates")
        if not all(0.0 <= w < 1.0 for w in (self.alpha, *omega)):
            raise ValueError("alpha and omega must lie in [0, 1)")
        object.__setattr__(self, "omega", omega)


def _to_fixed(x: float) -> int:
    return int(round(math.ldexp(x % 1.0, 64))) % _TWO64


def _gbinom(n: int, m: int) -> int:
    """Generalized binomial n(n-1)..(n-m+1)/m!, exact for every integer n."""
    num = 1
    for i in range(m):
        num *= n - i
    return num // math.factorial(m)


def _orbit_at(state: SkewShiftState, n: int) -> list[int]:
    """64-bit fixed-point coordinates of ``T^n omega`` via the binomial closed form."""
    A = _to_fixed(state.alpha)
    W = [_to_fixed(w) for w in state.omega]
    return [(sum(_gbinom(n, k - j) * W[j] for j in range(k + 1))
             + _gbinom(n, k + 1) * A) % _TWO64 for k in range(state.r)]


def skew_orbit(state: SkewShiftState, n0: int, length: int) -> np.ndarray:
    """Coordinates of ``T^n omega`` for ``n = n0 .. n0+length-1``, shape (length, r).

    Arithmetic is exact modulo 1 in 64-bit fixed point (inputs rounded to
    2^-64): the start point uses the closed form, the rest nested cumulative
    sums that wrap modulo 2^64.
    """
    r = state.r
    out = np.empty((length, r), dtype=np.float64)
    if length == 0 or r == 0:
        return out
    start = _orbit_at(state, int(n0))
    A = np.uint64(_to_fixed(state.alpha))
    prev = None
    for k in range(r):
        inc = np.empty(length, dtype=np.uint64)
        inc[0] = np.uint64(start[k])
        if k == 0:
            inc[1:] = A
        else:
            inc[1:] = prev[:-1]
        cur = np.cumsum(inc, dtype=np.uint64)
        out[:, k] = cur.astype(np.float64) * 2.0 ** -64
        prev = cur
    out[out >= 1.0] = 0.0
    return out


def _skew_last(state: SkewShiftState, n: np.ndarray) -> np.ndarray:
    flat = n.ravel()
    if flat.size == 0:
        return np.zeros(n.shape)
    lo, hi = int(flat.min()), int(flat.max())
    if hi - lo + 1 <= 4 * flat.size + 64:
        coords = skew_orbit(state, lo, hi - lo + 1)[:, -1]
        return coords[flat - lo].reshape(n.shape)
    vals = [_orbit_at(state, int(k))[-1] * 2.0 ** -64 for k in flat]
    return np.mod(np.array(vals), 1.0).reshape(n.shape)


def skewshift(f: ProfileFunction, state: SkewShiftState, c0=None) -> Coefficients:
    """a = 1, b(n) = f((T_alpha^n omega)_{r-1}); for r = 0, b = f(alpha)."""
    if state.r == 0:
        value = float(f(state.alpha))

        def rule(n):
            return _ones(n), np.full(np.shape(n), value)
    else:
        def rule(n):
            return _ones(n), f(_skew_last(state, np.asarray(n, dtype=np.int64)))

    desc = {"model": "skew", "r": state.r, "alpha": state.alpha,
            "omega": list(state.omega), "profile": f.describe()}
    return Coefficients(rule, _bound_c0(max(abs(f.fmax), abs(f.fmin)), c0), desc)


# ---------------------------------------------------------- discrepancy

def star_discrepancy(x) -> float:
    """Exact star discrepancy of points in [0, 1)."""
    x = np.sort(np.asarray(x, dtype=float).ravel())
    N = x.size
    if N == 0:
        raise ValueError("need at least one point")
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - x), np.max(x - (i - 1) / N)))


def discrepancy(kind: str, N: int, *, rho=None, alpha=None, state=None) -> float:
    """Star discrepancy of the first N points (n = 0..N-1) of a mod-1 sequence.

    ``kind`` is ``"nrho"`` (needs ``rho``), ``"rotation"`` (needs ``alpha``)
    or ``"skew"`` (last coordinate of a :class:`SkewShiftState`).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if kind == "nrho":
        pts = frac_power(np.arange(N), rho)
    elif kind == "rotation":
        pts = skew_orbit(SkewShiftState(1, float(alpha) % 1.0), 0, N)[:, 0]
    elif kind == "skew":
        if state.r == 0:
            pts = np.full(N, state.alpha)
        else:
            pts = skew_orbit(state, 0, N)[:, -1]
    else:
        raise ValueError(f"unknown sequence kind {kind!r}")
    return star_discrepancy(pts)


# ------------------------------------------------------------ descriptors

def _floats(text, what):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"malformed numbers in {what} descriptor: {text!r}") from None


def parse_profile(text: str) -> ProfileFunction:
    """``trig:a0[,a1,b1,...]`` or ``table:path``."""
    kind, _, rest = text.partition(":")
    if kind == "trig":
        c = _floats(rest, "trig")
        if not c:
            raise ValueError("trig profile needs at least a0")
        return ProfileFunction.trig(*c)
    if kind == "table":
        if not rest:
            raise ValueError("table profile needs a file path")
        if not Path(rest).is_file():
            raise ValueError(f"profile table {rest!r} not found")
        return load_table(rest)
    if kind == "identity" and not rest:
        return ProfileFunction.identity()
    raise ValueError(f"unknown profile descriptor {text!r}")


def parse_model(text: str, profile: ProfileFunction | None = None) -> Coefficients:
    """Build Coefficients from the model mini-language.

    ``free``, ``constant:c``, ``periodic:b1,b2,...``, ``anderson:seed,coupling``,
    ``sparse:h``, ``decaying:c,p``, ``nrho:rho``, ``skew:r,alpha[,w0,...]``.
    The last two sample ``profile``.
    """
    kind, sep, rest = text.partition(":")
    args = _floats(rest, kind) if sep else []

    def need(k, exact=True):
        if (len(args) != k) if exact else (len(args) < k):
            raise ValueError(f"model {kind!r} expects {k} parameter(s), got {text!r}")

    if kind == "free":
        need(0)
        return free()
    if kind == "constant":
        need(1)
        return constant(args[0])
    if kind == "periodic":
        need(1, exact=False)
        return periodic(args)
    if kind == "anderson":
        need(2)
        if args[0] != int(args[0]):
            raise ValueError("anderson seed must be an integer")
        return anderson(int(args[0]), args[1])
    if kind == "sparse":
        need(1)
        return sparse_squares(args[0])
    if kind == "decaying":
        need(2)
        return decaying(*args)
    if kind in ("nrho", "skew"):
        if profile is None:
            raise ValueError(f"model {kind!r} needs a profile")
        if kind == "nrho":
            need(1)
            return nrho(profile, args[0])
        need(2, exact=False)
        r = args[0]
        if r != int(r) or r < 0:
            raise ValueError("skew dimension r must be a nonnegative integer")
        omega = tuple(args[2:]) or (0.0,) * int(r)
        return skewshift(profile, SkewShiftState(int(r), args[1], omega))
    raise ValueError(f"unknown model descriptor {text!r}")
