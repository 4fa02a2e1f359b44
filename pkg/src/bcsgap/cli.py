"""Command-line front end; every command writes one CSV and prints '# ' summaries.

Exit status: 0 on success, 2 on invalid input, 3 when a solver fails to
converge or finds no transition.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig
from .errors import BcsGapError, DomainError, NonConvergenceError, NoSuperconductivityError
from .gap_solver import (
    critical_temperature,
    energy_gap,
    make_grid,
    solve_gap,
    universality_point,
)
from .gl_theory import cuniv_ratio, gl_coefficients, gl_ratio, ground_state_a0, psi_gl
from .model_bcs import ModelParams, delta_ratio_curve, tc_model
from .potentials import catalog, channel_spectrum, make_potential
from .universal import c_univ, f_bcs, tabulate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3

_NAME = re.compile(r"^[a-z][a-z0-9_]*$")

_POT_FLAGS = {
    "amplitude": "amplitude",
    "sigma": "sigma",
    "range": "range",
    "radius": "radius",
    "k0": "k0",
    "width": "width",
    "background": "background",
    "background_width": "background_width",
}


class CsvError(BcsGapError, ValueError):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    potential: str | None = None
    potential_params: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)
    out: str | None = None


def _format(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            raise CsvError("missing (NaN) value in table")
        return "%.17g" % float(v)
    if isinstance(v, str) and v:
        return v
    raise CsvError(f"missing or unsupported value {v!r}")


def emit_csv(table, path):
    """Write ``(columns, rows)`` as comma-separated text with a header line."""
    columns, rows = table
    columns = list(columns)
    for c in columns:
        if not _NAME.match(c):
            raise CsvError(f"column name {c!r} is not lowercase snake case")
    lines = []
    for r in rows:
        r = list(r)
        if len(r) != len(columns):
            raise CsvError("table is not rectangular")
        lines.append([_format(v) for v in r])
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            w.writerows(lines)
    except OSError as exc:
        raise CsvError(f"cannot write {path}: {exc}") from exc


def _floats(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DomainError(f"cannot parse number list {text!r}") from None
    if not vals:
        raise DomainError("empty number list")
    return vals


def _uniform(steps):
    if steps < 2:
        raise DomainError("need at least 2 steps")
    return [i / (steps - 1) for i in range(steps)]


def _say(line):
    print(f"# {line}")


def _potential(args):
    params = {}
    for flag, key in _POT_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            params[key] = v
    return make_potential(args.potential, **params)


def _grid(args, mu):
    kf = math.sqrt(mu)
    cw = None if args.core_width is None else args.core_width * kf
    return make_grid(mu, args.p_max_factor * kf, args.n_core, args.n_tail, cw)


def _cfg(args):
    return SolverConfig(tol=args.tol)


# ------------------------------------------------------------- commands

def cmd_universal_curve(args):
    hs = _uniform(args.steps)
    if args.l is None:
        table = tabulate(None, hs, tol=1e-8)
    else:
        table = tabulate((args.l, args.m), hs, tol=1e-8)
    emit_csv((table.columns, table.rows()), args.out)
    _say(f"points={len(hs)} f(1)={table.f_values[-1]:.12g}")


def cmd_model_bcs(args):
    params = ModelParams(args.lam, args.debye, args.mu)
    hs = _uniform(args.h_steps)
    tc = tc_model(params)
    sol = delta_ratio_curve(params, hs, tc=tc)
    rows, worst = [], 0.0
    for h, d in zip(sol.h_values, sol.delta_values):
        if h == 0.0:
            # 0/0 at the origin: report the limit via a tiny h
            hh = 1e-6
            dd = delta_ratio_curve(params, [hh], tc=tc).delta_values[0]
            ratio = dd / f_bcs(hh)
        else:
            ratio = d / f_bcs(h)
        rows.append([h, d, f_bcs(h), ratio])
        worst = max(worst, abs(ratio - 1.0))
    emit_csv((["h", "delta_over_tc", "f_bcs", "ratio"], rows), args.out)
    _say(f"tc={tc:.12g} max_abs_ratio_minus_1={worst:.6g}")


def cmd_tc(args):
    pot = _potential(args)
    grid = _grid(args, args.mu)
    res = critical_temperature(pot, args.lam, 0, grid, _cfg(args), l_max=args.lmax)
    spec = channel_spectrum(pot, args.mu, args.lmax)
    rows = [[l, t, spec.eigenvalues[l]] for l, t in sorted(res.tc_per_channel.items())]
    if args.out:
        emit_csv((["channel", "tc", "fermi_eigenvalue"], rows), args.out)
    for l, t, e in rows:
        _say(f"channel={l} tc={t:.12g} fermi_eigenvalue={e:.12g}")
    runner, t_tilde = res.runner_up
    _say(f"ground_channel={res.channel} tc={res.tc:.12g}"
         + (f" runner_up={runner} tc_runner_up={t_tilde:.12g}" if runner is not None else ""))


def cmd_gap(args):
    pot = _potential(args)
    grid = _grid(args, args.mu)
    cfg = _cfg(args)
    tc = critical_temperature(pot, args.lam, args.channel, grid, cfg).tc
    if args.temperature is not None:
        T = args.temperature
    elif args.h is not None:
        T = tc * (1.0 - args.h ** 2)
    else:
        raise DomainError("give --temperature or --h")
    sol = solve_gap(pot, args.lam, T, args.channel, grid, cfg, tc=tc)
    rows = [[p, d, sol.residual_norm, int(sol.converged)] for p, d in zip(grid.nodes, sol.delta)]
    emit_csv((["p", "delta", "residual_norm", "converged"], rows), args.out)
    _say(f"tc={tc:.12g} temperature={T:.12g} delta_fermi={sol.at_fermi():.12g} "
         f"xi={energy_gap(sol):.12g} iterations={sol.iterations}")


def _sweep_tc(job):
    pot, lam, channel, grid_args, cfg = job
    grid = make_grid(*grid_args)
    return critical_temperature(pot, lam, channel, grid, cfg).tc


def _sweep_point(job):
    pot, lam, tc, h, channel, grid_args, cfg = job
    grid = make_grid(*grid_args)
    row, _ = universality_point(pot, lam, tc, h, channel, grid, cfg)
    return row


def _pool_map(fn, jobs, n):
    if n <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, jobs))


def cmd_sweep(args):
    pot = _potential(args)
    lams = _floats(args.lambdas)
    hs = _floats(args.h_grid)
    if any(not 0 < h <= 1 for h in hs):
        raise DomainError("h values must lie in (0, 1]")
    kf = math.sqrt(args.mu)
    cw = None if args.core_width is None else args.core_width * kf
    gargs = (args.mu, args.p_max_factor * kf, args.n_core, args.n_tail, cw)
    make_grid(*gargs)
    cfg = _cfg(args)
    tcs = _pool_map(_sweep_tc, [(pot, lam, args.channel, gargs, cfg) for lam in lams], args.jobs)
    jobs = [(pot, lam, tc, h, args.channel, gargs, cfg) for lam, tc in zip(lams, tcs) for h in hs]
    rows = _pool_map(_sweep_point, jobs, args.jobs)
    cols = ["lambda", "tc", "h", "temperature", "xi", "delta_fermi", "f_bcs", "ratio",
            "residual_norm", "converged"]
    table = [[r.lam, r.tc, r.h, r.temperature, r.xi, r.delta_fermi, r.f_bcs, r.ratio,
              r.residual_norm, int(r.converged)] for r in rows]
    emit_csv((cols, table), args.out)
    for lam, tc in zip(lams, tcs):
        dev = max(abs(r.ratio - 1.0) for r in rows if r.lam == lam)
        _say(f"lambda={lam:g} tc={tc:.12g} max_abs_ratio_minus_1={dev:.6g}")


def cmd_gl_check(args):
    pot = _potential(args)
    grid = _grid(args, args.mu)
    cfg = _cfg(args)
    rows = []
    for lam in _floats(args.lambdas):
        tc = critical_temperature(pot, lam, 0, grid, cfg).tc
        a0 = ground_state_a0(pot, lam, tc, grid, cfg)
        co = gl_coefficients(a0)
        d0 = a0.delta0_at_fermi()
        ratio = gl_ratio(co, d0)
        limit = cuniv_ratio(min(tc / args.mu, 0.1), pot.dim)
        rows.append([lam, tc, co.c2, co.c4, d0, psi_gl(co, d0), ratio, limit,
                     ratio / c_univ() - 1.0])
        _say(f"lambda={lam:g} tc={tc:.12g} gl_ratio={ratio:.12g} "
             f"rel_dev_from_cuniv={ratio / c_univ() - 1.0:.6g}")
    cols = ["lambda", "tc", "c2", "c4", "delta0_fermi", "psi_gl", "gl_ratio",
            "cuniv_ratio", "rel_dev"]
    emit_csv((cols, rows), args.out)


# --------------------------------------------------------------- parsing

def _add_potential(p):
    p.add_argument("--potential", required=True, choices=sorted(catalog()))
    for flag in _POT_FLAGS:
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, type=float, default=None,
                       help="potential parameter (only for potentials that take it)")


def _add_grid(p):
    p.add_argument("--mu", type=float, default=1.0, help="chemical potential (default 1)")
    p.add_argument("--n-core", type=int, default=256, help="nodes near the Fermi radius")
    p.add_argument("--n-tail", type=int, default=96, help="nodes elsewhere")
    p.add_argument("--p-max-factor", type=float, default=4.0,
                   help="momentum cutoff in units of sqrt(mu) (default 4)")
    p.add_argument("--core-width", type=float, default=None,
                   help="clustering half-width in units of sqrt(mu) (default 0.25)")
    p.add_argument("--tol", type=float, default=1e-12, help="gap residual tolerance")


def build_parser():
    ap = argparse.ArgumentParser(prog="bcsgap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("universal-curve", help="tabulate the universal gap curve")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--l", type=int, default=None, help="channel l (with --m)")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_universal_curve)

    p = sub.add_parser("model-bcs", help="shell model gap ratio versus the universal curve")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--debye", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--h-steps", type=int, default=21)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_model_bcs)

    p = sub.add_parser("tc", help="critical temperature per angular channel")
    _add_potential(p)
    _add_grid(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--lmax", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_tc)

    p = sub.add_parser("gap", help="solve the gap equation at one temperature")
    _add_potential(p)
    _add_grid(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--temperature", type=float, default=None)
    p.add_argument("--h", type=float, default=None, help="reduced temperature sqrt(1 - T/T_c)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gap)

    p = sub.add_parser("sweep", help="universality ratio over couplings and temperatures")
    _add_potential(p)
    _add_grid(p)
    p.add_argument("--lambdas", required=True, help="comma-separated couplings")
    p.add_argument("--h-grid", default="0.2,0.4,0.6,0.8,1.0")
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("gl-check", help="Ginzburg-Landau ratio against C_univ")
    _add_potential(p)
    _add_grid(p)
    p.add_argument("--lambdas", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gl_check)
    return ap


def run(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        args.fn(args)
    except (NonConvergenceError, NoSuperconductivityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (BcsGapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
