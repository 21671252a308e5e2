"""Command-line front end: energy sweeps and statistics written as CSV.

Every subcommand reads a model descriptor (``--model``) and, where needed, a
profile descriptor (``--profile``), evaluates one quantity on an energy grid
``linspace(emin, emax, ne)`` (or a single statistic), and writes a CSV with
``#`` metadata lines followed by a header and the data rows.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure (the
rows computed before the failure are written and flagged as partial).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .averaging import compare_average
from .eigen import ids_estimate, thouless_rhs
from .lattice import BoundError, SingularityError
from .measures import (convergence_in_probability, cylinder_distance, drr_statistic,
                       empirical_measure, periodic_measure)
from .models import SkewShiftState, discrepancy, nrho, parse_model, parse_profile
from .transfer import cosine_sine, lyapunov_finite
from .weyl import MFunctionError, lyap_via_m, m_minus, m_plus, reflectionless_defect

SUBCOMMANDS = ("lyapunov", "ids", "thouless-check", "mfunction", "average", "drr",
               "measure-dist", "equidist", "reflectionless")


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines the output of a run.

    The worker count and the timestamp flag are deliberately excluded: they
    never change the numbers.
    """

    subcommand: str
    model: str = "free"
    profile: str = "identity"
    emin: float = -3.0
    emax: float = 3.0
    ne: int = 61
    eta: float = 0.0
    n: int = 10_000
    k: int = 8
    eps: float = 0.5
    rho: float = 0.5
    nodes: int = 4096
    seed: int = 0
    tol: float = 1e-12
    quantity: str = "lyapunov"
    check: str = "thouless"
    side: str = "plus"
    target: str = "exact"
    period: int = 0
    degree: int = 2
    kind: str = "nrho"
    alpha: float = 0.0
    n_alpha: int = 64
    n_omega: int = 4
    n_inner: int = 100_000
    output: str = "-"

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"--{f.name.replace('_', '-')} must be finite")
        if self.ne < 1:
            raise ConfigError("--ne must be >= 1")
        if self.emin > self.emax:
            raise ConfigError("--emin must not exceed --emax")
        if self.n < 1:
            raise ConfigError("--n must be >= 1")
        if self.k < 0:
            raise ConfigError("--k must be >= 0")
        if self.eta < 0:
            raise ConfigError("--eta must be >= 0")
        return self

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    def energies(self) -> np.ndarray:
        return np.linspace(self.emin, self.emax, self.ne)


class _Partial(Exception):
    def __init__(self, rows, cause):
        super().__init__(str(cause))
        self.rows = rows
        self.cause = cause


def _ordered_map(func, items, workers):
    """``[func(x) for x in items]``; on failure raises _Partial with the leading rows."""
    items = list(items)
    rows = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(func, x) for x in items]
        for fut in futures:
            try:
                rows.append(fut.result())
            except (ArithmeticError, FloatingPointError) as exc:
                for f in futures:
                    f.cancel()
                raise _Partial(rows, exc) from exc
    return rows


def _chunked(func, E, workers):
    """Apply a vectorized ``func`` to contiguous chunks of the grid, in order."""
    parts = [p for p in np.array_split(E, max(1, min(workers, E.size))) if p.size]
    out = _ordered_map(lambda p: np.atleast_1d(func(p)), parts, workers)
    return np.concatenate(out)


# ------------------------------------------------------------ subcommands

def _model(cfg):
    profile = parse_profile(cfg.profile) if cfg.model.startswith(("nrho", "skew")) else None
    return parse_model(cfg.model, profile)


def _z(cfg, E):
    return E + 1j * cfg.eta


def _run_lyapunov(cfg, workers):
    J, E = _model(cfg), cfg.energies()
    L = _chunked(lambda e: lyapunov_finite(J, _z(cfg, e), cfg.n), E, workers)
    return ("E", "L"), list(zip(E, L))


def _run_ids(cfg, workers):
    J, E = _model(cfg), cfg.energies()
    k = _chunked(lambda e: ids_estimate(J, e, cfg.n), E, workers)
    return ("E", "k"), list(zip(E, k))


def _log_c(J, z, N):
    return cosine_sine(J, z, N).log_abs_c() / N


def _run_thouless(cfg, workers):
    J, E = _model(cfg), cfg.energies()
    z = _z(cfg, E)
    if cfg.check == "thouless":
        lhs = _chunked(lambda zz: lyapunov_finite(J, zz, cfg.n), z, workers)
        rhs = np.atleast_1d(thouless_rhs(J, z, cfg.n))
    elif cfg.check == "logc":
        lhs = np.array(_ordered_map(lambda zz: _log_c(J, zz, cfg.n), z, workers))
        rhs = np.atleast_1d(thouless_rhs(J, z, cfg.n))
    elif cfg.check == "m-route":
        lhs = np.array(_ordered_map(lambda zz: lyap_via_m(J, zz, cfg.n, cfg.tol), z, workers))
        rhs = _chunked(lambda zz: lyapunov_finite(J, zz, cfg.n), z, workers)
    else:
        raise ConfigError(f"unknown --check {cfg.check!r}")
    return ("E", "lhs", "rhs", "gap"), list(zip(E, lhs, rhs, np.abs(lhs - rhs)))


def _run_mfunction(cfg, workers):
    if not cfg.eta > 0:
        raise ConfigError("mfunction needs --eta > 0")
    J, E = _model(cfg), cfg.energies()
    fn = {"plus": m_plus, "minus": m_minus}.get(cfg.side)
    if fn is None:
        raise ConfigError(f"--side must be plus or minus, got {cfg.side!r}")

    def one(e):
        m = fn(J, complex(e, cfg.eta), cfg.tol).value
        return e, m.real, m.imag
    return ("E", "re", "im"), _ordered_map(one, E, workers)


def _run_average(cfg, workers):
    f = parse_profile(cfg.profile)
    E = cfg.energies()
    if cfg.quantity not in ("lyapunov", "ids"):
        raise ConfigError(f"--quantity must be lyapunov or ids, got {cfg.quantity!r}")
    if not cfg.rho > 0:
        raise ConfigError("--rho must be positive")
    J = nrho(f, cfg.rho)

    def one(e):
        rep = compare_average(f, cfg.rho, e, cfg.quantity, cfg.n, cfg.nodes, cfg.n_alpha,
                              cfg.n_omega, cfg.n_inner, cfg.seed, J=J)
        return e, rep.lhs[0], rep.rhs[0], rep.gap[0]
    return ("E", "direct", "averaged", "gap"), _ordered_map(one, E, workers)


def _run_drr(cfg, workers):
    return ("N", "value"), [(cfg.n, drr_statistic(_model(cfg), cfg.n, cfg.eps))]


def _run_measure_dist(cfg, workers):
    J = _model(cfg)
    if cfg.target == "exact":
        period = cfg.period
        if period < 1:
            desc = J.describe()
            if desc.get("model") != "periodic":
                raise ConfigError("--target exact needs a periodic model or --period")
            period = len(desc["values"])
        mu = empirical_measure(J, cfg.n, cfg.k)
        dist = cylinder_distance(mu, periodic_measure(J, period, cfg.k), cfg.degree)
    elif cfg.target == "free_torus":
        dist = convergence_in_probability(J, "free_torus", cfg.n, cfg.eps, cfg.k)
    else:
        raise ConfigError(f"--target must be exact or free_torus, got {cfg.target!r}")
    return ("N", "distance"), [(cfg.n, dist)]


def _run_equidist(cfg, workers):
    if cfg.kind == "nrho":
        val = discrepancy("nrho", cfg.n, rho=cfg.rho)
    elif cfg.kind == "rotation":
        val = discrepancy("rotation", cfg.n, alpha=cfg.alpha)
    elif cfg.kind == "skew":
        r = int(math.floor(cfg.rho))
        val = discrepancy("skew", cfg.n, state=SkewShiftState(r, cfg.alpha % 1.0))
    else:
        raise ConfigError(f"--kind must be nrho, rotation or skew, got {cfg.kind!r}")
    return ("N", "discrepancy"), [(cfg.n, val)]


def _run_reflectionless(cfg, workers):
    if not cfg.eta > 0:
        raise ConfigError("reflectionless needs --eta > 0")
    J, E = _model(cfg), cfg.energies()
    tol = max(cfg.tol, 1e-10)
    return ("E", "defect"), _ordered_map(
        lambda e: (e, reflectionless_defect(J, e, cfg.eta, tol)), E, workers)


_RUNNERS = {
    "lyapunov": _run_lyapunov, "ids": _run_ids, "thouless-check": _run_thouless,
    "mfunction": _run_mfunction, "average": _run_average, "drr": _run_drr,
    "measure-dist": _run_measure_dist, "equidist": _run_equidist,
    "reflectionless": _run_reflectionless,
}


# ----------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def format_csv(cfg: RunConfig, header, rows, status="ok", timestamp=True) -> str:
    lines = [f"# jacobiavg {__version__}",
             f"# config: {cfg.to_json()}",
             f"# seed: {cfg.seed}"]
    if timestamp:
        lines.append(f"# timestamp: {datetime.now(timezone.utc).isoformat()}")
    lines.append(f"# status: {status}")
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, workers: int | None = None, timestamp: bool = True):
    """Execute ``cfg``; returns ``(exit_code, csv_text)``.

    Raises :class:`ConfigError` for invalid configurations.
    """
    cfg.validate()
    workers = workers or os.cpu_count() or 1
    try:
        header, rows = _RUNNERS[cfg.subcommand](cfg, workers)
        status, code = "ok", 0
    except _Partial as exc:
        header = _HEADERS[cfg.subcommand]
        rows, status, code = exc.rows, f"partial ({type(exc.cause).__name__}: {exc})", 3
    except (MFunctionError, SingularityError, FloatingPointError, ArithmeticError) as exc:
        header = _HEADERS[cfg.subcommand]
        rows, status, code = [], f"partial ({type(exc).__name__}: {exc})", 3
    except (BoundError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return code, format_csv(cfg, header, rows, status, timestamp)


_HEADERS = {
    "lyapunov": ("E", "L"), "ids": ("E", "k"), "thouless-check": ("E", "lhs", "rhs", "gap"),
    "mfunction": ("E", "re", "im"), "average": ("E", "direct", "averaged", "gap"),
    "drr": ("N", "value"), "measure-dist": ("N", "distance"),
    "equidist": ("N", "discrepancy"), "reflectionless": ("E", "defect"),
}


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    d = RunConfig("lyapunov")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--model", default=d.model,
                   help="free | constant:c | periodic:b1,.. | anderson:seed,w | sparse:h | "
                        "decaying:c,p | nrho:rho | skew:r,alpha[,w0,..]")
    g.add_argument("--profile", default=d.profile,
                   help="identity | trig:a0[,a1,b1,..] | table:path")
    g = common.add_argument_group("grid and sizes")
    g.add_argument("--emin", type=float, default=d.emin)
    g.add_argument("--emax", type=float, default=d.emax)
    g.add_argument("--ne", type=int, default=d.ne, help="number of grid energies")
    g.add_argument("--eta", type=float, default=d.eta, help="imaginary part of z")
    g.add_argument("--n", type=int, default=d.n, help="box length / sample size N")
    g.add_argument("--k", type=int, default=d.k, help="window radius K")
    g.add_argument("--eps", type=float, default=d.eps)
    g.add_argument("--rho", type=float, default=d.rho)
    g.add_argument("--nodes", type=int, default=d.nodes, help="quadrature nodes")
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--tol", type=float, default=d.tol)
    g = common.add_argument_group("subcommand options")
    g.add_argument("--quantity", default=d.quantity, help="lyapunov | ids (average)")
    g.add_argument("--check", default=d.check,
                   help="thouless | logc | m-route (thouless-check)")
    g.add_argument("--side", default=d.side, help="plus | minus (mfunction)")
    g.add_argument("--target", default=d.target, help="exact | free_torus (measure-dist)")
    g.add_argument("--period", type=int, default=d.period,
                   help="period for --target exact (default: from the model)")
    g.add_argument("--degree", type=int, default=d.degree, help="moment degree, 1 or 2")
    g.add_argument("--kind", default=d.kind, help="nrho | rotation | skew (equidist)")
    g.add_argument("--alpha", type=float, default=d.alpha)
    g.add_argument("--n-alpha", type=int, default=d.n_alpha)
    g.add_argument("--n-omega", type=int, default=d.n_omega)
    g.add_argument("--n-inner", type=int, default=d.n_inner)
    g = common.add_argument_group("output")
    g.add_argument("--output", "-o", default=d.output, help="CSV path, '-' for stdout")
    g.add_argument("--workers", type=int, default=None,
                   help="threads for grid evaluation (default: all cores)")
    g.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp line, making output byte-reproducible")

    p = argparse.ArgumentParser(prog="jacobiavg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in names})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        code, text = run(cfg, ns.workers, timestamp=not ns.no_timestamp)
    except ConfigError as exc:
        print(f"jacobiavg: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    if code:
        print("jacobiavg: numerical failure, partial output written", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
