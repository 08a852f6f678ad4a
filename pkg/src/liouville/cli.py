"""Command-line driver: one binary, twelve subcommands.

Fields travel as CSV, written to a file or to stdout, so an exact
solution can be piped straight into ``verify``.  Every run ends with a
single JSON summary line on stdout carrying a digest of the effective
inputs and the headline numbers, which is what the acceptance scripts
parse.  Exit codes: 0 success, 1 domain or usage error, 2 solver
non-convergence.
"""

from __future__ import annotations

import argparse
import functools
import hashlib
import json
import math
import sys
from typing import Optional

import numpy as np

from . import action as action_mod
from . import closedform, elliptic, hyperbolic
from .errors import (
    CellIterationDivergenceError,
    CliUsageError,
    LiouvilleError,
    NonConvergenceError,
    OdeOverflowError,
    StepFailureError,
)
from .expr import Expr, parse
from .fields import (
    Grid2D,
    LiouvilleParams,
    ScalarField2D,
    norms,
    residual_elliptic,
    residual_hyperbolic,
    residual_log,
)

__all__ = ["run", "main", "build_parser"]

HELP_WIDTH = 80

# Failures of an iteration that was set up correctly exit 2; everything
# else raised by the library is a domain or usage problem and exits 1.
_NONCONVERGENCE = (
    NonConvergenceError,
    StepFailureError,
    CellIterationDivergenceError,
    OdeOverflowError,
)


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems through error(); rerouting them
    into the package's exception hierarchy keeps the exit code at 1
    instead of argparse's hard-coded 2 (which we reserve for solvers)."""

    def error(self, message):
        raise CliUsageError(message)


_FMT = functools.partial(argparse.HelpFormatter, width=HELP_WIDTH)


# --- summary line --------------------------------------------------------


def _num(x) -> Optional[float]:
    v = float(x)
    return v if math.isfinite(v) else None


def _digest(pairs: dict) -> str:
    blob = json.dumps(pairs, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _print_summary(command: Optional[str], digest: str, status: str,
                   payload: dict) -> None:
    doc = dict(payload)
    doc["command"] = command
    doc["digest"] = digest
    doc["status"] = status
    sys.stdout.write(json.dumps(doc, sort_keys=True, allow_nan=False) + "\n")


def _field_stats(field: ScalarField2D) -> dict:
    v = field.values
    finite = np.isfinite(v)
    stats = {"n_masked": int(v.size - finite.sum())}
    if finite.any():
        stats["u_min"] = _num(v[finite].min())
        stats["u_max"] = _num(v[finite].max())
    else:
        stats["u_min"] = stats["u_max"] = None
    return stats


# --- shared flag groups --------------------------------------------------


def _add_rect(p, domain, nx=65, ny=65) -> None:
    p.add_argument("--domain", nargs=4, type=float, default=list(domain),
                   metavar=("X0", "Y0", "X1", "Y1"),
                   help="rectangle corners x0 y0 x1 y1, dimensionless "
                        "(default %(default)s)")
    p.add_argument("--nx", type=int, default=nx,
                   help="grid nodes along x (default %(default)s)")
    p.add_argument("--ny", type=int, default=ny,
                   help="grid nodes along y (default %(default)s)")


def _add_params(p, K=1.0, a=1.0) -> None:
    p.add_argument("--K", type=float, default=K,
                   help="coefficient K, dimensionless (default %(default)s)")
    p.add_argument("--a", type=float, default=a,
                   help="exponent coefficient a, dimensionless "
                        "(default %(default)s)")


def _add_out(p, what="field CSV") -> None:
    p.add_argument("--out", default="-",
                   help=f"{what} destination, '-' for stdout "
                        "(default %(default)s)")


def _add_in(p, what="field CSV") -> None:
    p.add_argument("--in", dest="infile", default="-",
                   help=f"{what} source, '-' for stdin (default %(default)s)")


def _add_threads(p) -> None:
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; the kernels are sequential numpy, "
                        "so any value gives byte-identical output "
                        "(default %(default)s)")


def _grid(ns) -> Grid2D:
    x0, y0, x1, y1 = ns.domain
    return Grid2D.from_bounds(x0, y0, x1, y1, ns.nx, ns.ny)


def _write_field(field, out) -> None:
    field.write_csv(sys.stdout if out == "-" else out)


def _read_field(infile) -> ScalarField2D:
    return ScalarField2D.read_csv(sys.stdin if infile == "-" else infile)


def _boundary(text: str):
    """Dirichlet data: a plain number, else an expression in x and y."""
    try:
        return float(text)
    except ValueError:
        return parse(text, ("x", "y"))


# --- subcommand handlers -------------------------------------------------


def _cmd_exact_h(ns) -> dict:
    cp = closedform.CharacteristicPair(parse(ns.f, ("x",)), parse(ns.g, ("y",)))
    field = closedform.hyperbolic_exact(cp, LiouvilleParams(ns.K, ns.a),
                                        _grid(ns))
    _write_field(field, ns.out)
    return _field_stats(field)


def _cmd_exact_e(ns) -> dict:
    seed = closedform.AnalyticSeed(parse(ns.F, ("z",)), ns.sign)
    field = closedform.elliptic_exact(seed, ns.K, ns.a, _grid(ns))
    _write_field(field, ns.out)
    return _field_stats(field)


def _cmd_blowup_exact(ns) -> dict:
    field = closedform.boundary_blowup_exact(_grid(ns))
    _write_field(field, ns.out)
    return _field_stats(field)


def _cmd_blowup_curve(ns) -> dict:
    cp = closedform.CharacteristicPair(parse(ns.f, ("x",)), parse(ns.g, ("y",)))
    curve = closedform.blowup_curve(cp, tuple(ns.x_range), tuple(ns.y_range),
                                    ns.samples, ns.tol)
    curve.write_csv(sys.stdout if ns.out == "-" else ns.out)
    found = sum(1 for _, y in curve.samples if y is not None)
    return {"samples": len(curve.samples), "n_found": found}


def _cmd_verify(ns) -> dict:
    if ns.eq == "log" and ns.a != 1.0:
        raise CliUsageError("the log form fixes a = 1")
    field = _read_field(ns.infile)
    if ns.eq == "hyperbolic":
        res = residual_hyperbolic(field, LiouvilleParams(ns.K, ns.a))
    elif ns.eq == "elliptic":
        res = residual_elliptic(field, LiouvilleParams(ns.K, ns.a))
    else:
        res = residual_log(field, ns.K)
    nm = norms(res)
    cells = int(np.isfinite(res.values).sum())
    return {"eq": ns.eq, "max_abs": _num(nm.max_abs), "l2": _num(nm.l2),
            "cells": cells}


def _cmd_solve_elliptic(ns) -> dict:
    if ns.geometry == "disk":
        geometry = elliptic.DiskGeometry(ns.n)
    else:
        geometry = elliptic.RectangleGeometry(_grid(ns))
    problem = elliptic.DirichletProblem(geometry, LiouvilleParams(ns.K, ns.a),
                                        _boundary(ns.boundary))
    solution, report = elliptic.solve_dirichlet(problem, tol=ns.tol,
                                                max_iter=ns.max_iter)
    solution.write_csv(sys.stdout if ns.out == "-" else ns.out)
    payload = {"report": report.to_dict()}
    if isinstance(solution, elliptic.RadialProfile):
        payload["u_center"] = _num(solution.u0)
    else:
        payload.update(_field_stats(solution))
    return payload


def _cmd_gelfand(ns) -> dict:
    if ns.geometry == "disk":
        geometry = elliptic.DiskGeometry(ns.n)
    else:
        geometry = elliptic.RectangleGeometry(_grid(ns))
    branch = elliptic.continue_branch(
        geometry, ns.lam_start, ns.max_steps, ns.ds, lam_stop=ns.lam_stop,
        u0_cap=ns.u0_cap, tol=ns.tol, fold_tol=ns.fold_tol)
    branch.write_csv(sys.stdout if ns.out == "-" else ns.out)
    payload = {"points": len(branch.points), "aborted": branch.aborted}
    if branch.fold is not None:
        payload["lambda0"] = _num(branch.fold.lam0)
        payload["u0_at_fold"] = _num(branch.fold.u0)
    else:
        payload["lambda0"] = None
        payload["u0_at_fold"] = None
    return payload


def _cmd_blowup_approx(ns) -> dict:
    Ms = list(ns.M)
    if ns.out != "-" and len(Ms) > 1 and "{M}" not in ns.out:
        raise CliUsageError(
            "--out needs a {M} placeholder when several M values are given")
    profiles = elliptic.boundary_blowup_approx(elliptic.DiskGeometry(ns.n),
                                               Ms, tol=ns.tol)
    if ns.out == "-":
        # one r,u block per M, blank-line separated (gnuplot index format)
        for i, prof in enumerate(profiles):
            if i:
                sys.stdout.write("\n")
            prof.write_csv(sys.stdout)
    else:
        for M, prof in zip(Ms, profiles):
            prof.write_csv(ns.out.replace("{M}", format(M, "g")))
    limit = math.log(8.0)
    centers = [prof.u0 for prof in profiles]
    return {"M": Ms, "centers": [_num(c) for c in centers],
            "gaps": [_num(limit - c) for c in centers], "limit": _num(limit)}


def _cmd_march(ns) -> dict:
    data = hyperbolic.GoursatData(parse(ns.phi, ("x",)), parse(ns.psi, ("y",)))
    result = hyperbolic.march(data, LiouvilleParams(ns.K, ns.a), _grid(ns),
                              ns.threshold)
    _write_field(result.field, ns.out)
    if ns.mask_out is not None:
        result.write_mask_csv(ns.mask_out)
    return _field_stats(result.field)


def _cmd_backlund(ns) -> dict:
    w = hyperbolic.WaveSolution(parse(ns.w_phi, ("x",)), parse(ns.w_psi, ("y",)))
    field = hyperbolic.backlund(w, ns.bt_a, ns.u_corner, _grid(ns), ns.order)
    _write_field(field, ns.out)
    return _field_stats(field)


def _cmd_action(ns) -> dict:
    field = _read_field(ns.infile)
    p = action_mod.ActionParams(ns.C, ns.mu)
    value = action_mod.action_value(field, p)
    grad = action_mod.action_gradient(field, p)
    if ns.grad_out is not None:
        grad.write_csv(ns.grad_out)
    payload = {"value": _num(value),
               "grad_max": _num(np.abs(grad.values).max())}
    if ns.fd_check > 0:
        payload["fd_rel_max"] = _num(_fd_gradient_check(field, p, grad,
                                                        ns.fd_check))
    return payload


def _fd_gradient_check(field: ScalarField2D, p, grad: ScalarField2D,
                       n_probe: int) -> float:
    """Central-difference probe of the gradient at up to ``n_probe``
    interior nodes, chosen by a fixed-seed generator so reruns agree."""
    ny, nx = field.values.shape
    if nx < 3 or ny < 3:
        raise CliUsageError("--fd-check needs at least a 3x3 grid")
    rng = np.random.default_rng(0)
    total = (nx - 2) * (ny - 2)
    picks = rng.choice(total, size=min(n_probe, total), replace=False)
    worst = 0.0
    for flat in np.sort(picks):
        j = 1 + int(flat) // (nx - 2)
        i = 1 + int(flat) % (nx - 2)
        step = 1e-6 * (1.0 + abs(field.values[j, i]))
        bumped = field.values.copy()
        bumped[j, i] += step
        plus = action_mod.action_value(ScalarField2D(field.grid, bumped), p)
        bumped[j, i] -= 2.0 * step
        minus = action_mod.action_value(ScalarField2D(field.grid, bumped), p)
        fd = (plus - minus) / (2.0 * step)
        scale = max(abs(fd), abs(grad.values[j, i]), 1e-30)
        worst = max(worst, abs(fd - grad.values[j, i]) / scale)
    return worst


def _cmd_convert_log(ns) -> dict:
    field = _read_field(ns.infile)
    out = closedform.convert_log_form(field, ns.direction.replace("-", "_"))
    _write_field(out, ns.out)
    return _field_stats(out)


# --- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liouville", formatter_class=_FMT,
                     description="Closed-form solutions, solvers and "
                                 "verification tools for the Liouville "
                                 "equations.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="SUBCOMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, formatter_class=_FMT, help=help_text,
                           description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("exact-h", _cmd_exact_h,
            "Evaluate the two-function exact solution of u_xy = K e^(a u).")
    p.add_argument("--f", required=True,
                   help="characteristic function f(x), an expression in x")
    p.add_argument("--g", required=True,
                   help="characteristic function g(y), an expression in y")
    _add_params(p)
    _add_rect(p, (0.5, 0.5, 1.5, 1.5))
    _add_out(p)
    _add_threads(p)

    p = add("exact-e", _cmd_exact_e,
            "Evaluate the analytic-seed exact solution of Lap u = K e^(a u).")
    p.add_argument("--F", required=True,
                   help="analytic seed F(z), an expression in z = x + iy")
    p.add_argument("--sign", choices=("minus", "plus"), default="minus",
                   help="sign in (1 -+ |F|^2)^2: minus pairs with K > 0, "
                        "plus with K < 0 (default %(default)s)")
    _add_params(p)
    _add_rect(p, (-0.5, -0.5, 0.5, 0.5))
    _add_out(p)
    _add_threads(p)

    p = add("blowup-exact", _cmd_blowup_exact,
            "Evaluate u = ln(8/(1 - x^2 - y^2)^2), the boundary blow-up "
            "solution of Lap u = e^u on the unit disk (NaN outside).")
    _add_rect(p, (-1.0, -1.0, 1.0, 1.0))
    _add_out(p)
    _add_threads(p)

    p = add("blowup-curve", _cmd_blowup_curve,
            "Trace the singular locus f(x) + g(y) = 0 of the two-function "
            "solution as a sampled curve y(x).")
    p.add_argument("--f", required=True,
                   help="characteristic function f(x), an expression in x")
    p.add_argument("--g", required=True,
                   help="characteristic function g(y), an expression in y; "
                        "must be strictly monotone on the y interval")
    p.add_argument("--x-range", nargs=2, type=float, default=[0.0, 1.0],
                   metavar=("XA", "XB"),
                   help="x interval to sample (default %(default)s)")
    p.add_argument("--y-range", nargs=2, type=float, default=[0.0, 1.0],
                   metavar=("YA", "YB"),
                   help="y interval searched for the crossing "
                        "(default %(default)s)")
    p.add_argument("--samples", type=int, default=101,
                   help="number of x samples (default %(default)s)")
    p.add_argument("--tol", type=float, default=1e-12,
                   help="root tolerance on f + g (default %(default)s)")
    _add_out(p, "curve CSV (x,y rows, NA where no crossing)")
    _add_threads(p)

    p = add("verify", _cmd_verify,
            "Read a field CSV and report residual norms for the chosen "
            "equation.")
    _add_in(p)
    p.add_argument("--eq", choices=("hyperbolic", "elliptic", "log"),
                   required=True,
                   help="equation to check: u_xy = K e^(a u), "
                        "Lap u = K e^(a u), or the T = e^u log form")
    _add_params(p)
    _add_threads(p)

    p = add("solve-elliptic", _cmd_solve_elliptic,
            "Solve Lap u = K e^(a u) with Dirichlet data by damped Newton "
            "iteration.")
    p.add_argument("--geometry", choices=("rectangle", "disk"),
                   default="rectangle",
                   help="rectangle grid or radially symmetric unit disk "
                        "(default %(default)s)")
    _add_rect(p, (-0.5, -0.5, 0.5, 0.5))
    p.add_argument("--n", type=int, default=257,
                   help="radial nodes for --geometry disk "
                        "(default %(default)s)")
    p.add_argument("--boundary", default="0",
                   help="Dirichlet data: a number, or an expression in x and "
                        "y (rectangle only; default %(default)s)")
    _add_params(p)
    p.add_argument("--tol", type=float, default=elliptic.NEWTON_TOL,
                   help="residual max-norm target (default %(default)s)")
    p.add_argument("--max-iter", type=int, default=elliptic.MAX_NEWTON,
                   help="Newton iteration cap (default %(default)s)")
    _add_out(p, "solution CSV (field, or r,u rows for the disk)")
    _add_threads(p)

    p = add("gelfand", _cmd_gelfand,
            "Trace the solution branch of Lap u + lambda e^u = 0, u = 0 on "
            "the boundary, through its fold by pseudo-arclength "
            "continuation.")
    p.add_argument("--geometry", choices=("disk", "rectangle"),
                   default="disk",
                   help="radially symmetric unit disk or rectangle grid "
                        "(default %(default)s)")
    p.add_argument("--n", type=int, default=257,
                   help="radial nodes for --geometry disk "
                        "(default %(default)s)")
    _add_rect(p, (-0.5, -0.5, 0.5, 0.5))
    p.add_argument("--lam-start", type=float, default=0.0,
                   help="lambda at the branch foot (default %(default)s)")
    p.add_argument("--ds", type=float, default=0.05,
                   help="initial arclength step (default %(default)s)")
    p.add_argument("--max-steps", type=int, default=500,
                   help="continuation step cap (default %(default)s)")
    p.add_argument("--lam-stop", type=float, default=None,
                   help="stop once past the fold and lambda drops below "
                        "this (default: u0 cap only)")
    p.add_argument("--u0-cap", type=float, default=15.0,
                   help="stop once u(center) exceeds this "
                        "(default %(default)s)")
    p.add_argument("--tol", type=float, default=elliptic.NEWTON_TOL,
                   help="corrector residual target (default %(default)s)")
    p.add_argument("--fold-tol", type=float, default=1e-6,
                   help="lambda gap for the fold bracket (default "
                        "%(default)s)")
    _add_out(p, "branch CSV (s,lambda,u0 rows)")
    _add_threads(p)

    p = add("blowup-approx", _cmd_blowup_approx,
            "Approximate the boundary blow-up solution of Lap u = e^u on "
            "the unit disk by solving with boundary data M for each M.")
    p.add_argument("--n", type=int, default=1025,
                   help="radial nodes (default %(default)s)")
    p.add_argument("--M", nargs="+", type=float, default=[5.0, 8.0, 11.0],
                   help="strictly increasing boundary values "
                        "(default %(default)s)")
    p.add_argument("--tol", type=float, default=elliptic.NEWTON_TOL,
                   help="residual max-norm target (default %(default)s)")
    _add_out(p, "profile CSV; with several M give a {M} placeholder, or "
                "'-' for blank-line separated blocks")
    _add_threads(p)

    p = add("march", _cmd_march,
            "Integrate u_xy = K e^(a u) from Goursat edge data by "
            "characteristic marching; nodes past blow-up are masked NaN.")
    p.add_argument("--phi", required=True,
                   help="bottom-edge data u(x, y0), an expression in x")
    p.add_argument("--psi", required=True,
                   help="left-edge data u(x0, y), an expression in y; must "
                        "match phi at the corner")
    _add_params(p)
    _add_rect(p, (0.0, 0.0, 1.0, 1.0))
    p.add_argument("--threshold", type=float,
                   default=hyperbolic.BLOWUP_THRESHOLD,
                   help="u value treated as blown up (default %(default)s)")
    p.add_argument("--mask-out", default=None,
                   help="optional CSV path for the 0/1 blow-up mask")
    _add_out(p)
    _add_threads(p)

    p = add("backlund", _cmd_backlund,
            "Map a wave-equation solution w = phi(x) + psi(y) to a solution "
            "of u_xy = e^u by integrating the first-order pair along grid "
            "lines.")
    p.add_argument("--w-phi", default="0",
                   help="phi(x) part of the wave solution "
                        "(default %(default)s)")
    p.add_argument("--w-psi", default="0",
                   help="psi(y) part of the wave solution "
                        "(default %(default)s)")
    p.add_argument("--bt-a", type=float, default=2.0,
                   help="nonzero transformation parameter "
                        "(default %(default)s)")
    p.add_argument("--u-corner", type=float, default=0.0,
                   help="integration constant u(x0, y0) "
                        "(default %(default)s)")
    p.add_argument("--order", choices=("xy", "yx"), default="xy",
                   help="integrate along x then y, or y then x "
                        "(default %(default)s)")
    _add_rect(p, (0.0, 0.0, 0.5, 0.5))
    _add_out(p)
    _add_threads(p)

    p = add("action", _cmd_action,
            "Evaluate the action C sum(cells) (|grad phi|^2 / 2 + mu^2 "
            "e^phi) of a field and its exact interior gradient.")
    _add_in(p)
    p.add_argument("--C", type=float, default=1.0,
                   help="positive overall coefficient (default %(default)s)")
    p.add_argument("--mu", type=float, default=1.0,
                   help="mass parameter mu (default %(default)s)")
    p.add_argument("--fd-check", type=int, default=0, metavar="N",
                   help="probe the gradient at N fixed-seed interior nodes "
                        "by central differences (default %(default)s)")
    p.add_argument("--grad-out", default=None,
                   help="optional CSV path for the gradient field")
    _add_threads(p)

    p = add("convert-log", _cmd_convert_log,
            "Convert between u and T = e^u, the substitution linking "
            "u_xy = K e^u to the log form of the equation.")
    _add_in(p)
    p.add_argument("--direction", choices=("u-to-T", "T-to-u"),
                   required=True, help="which way to convert")
    _add_out(p)
    _add_threads(p)

    return parser


# --- entry points --------------------------------------------------------


def run(argv=None) -> int:
    """Parse ``argv`` (default sys.argv[1:]), run the subcommand, print
    the JSON summary line, and return the exit code."""
    args = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(args)
    except SystemExit as exc:  # --help prints and exits 0
        return int(exc.code or 0)
    except CliUsageError as exc:
        command = next((a for a in args if not a.startswith("-")), None)
        payload = {"error": {"code": exc.code, "message": str(exc)}}
        _print_summary(command, _digest({"argv": args}), "error", payload)
        sys.stderr.write(f"error: {exc}\n")
        return 1

    inputs = {k: v for k, v in vars(ns).items() if k != "func"}
    digest = _digest(inputs)
    try:
        if ns.threads < 1:
            raise CliUsageError("--threads must be at least 1")
        payload = ns.func(ns)
    except LiouvilleError as exc:
        payload = {"error": {"code": exc.code, "message": str(exc)}}
        _print_summary(ns.command, digest, "error", payload)
        sys.stderr.write(f"error: {exc}\n")
        return 2 if isinstance(exc, _NONCONVERGENCE) else 1
    _print_summary(ns.command, digest, "ok", payload)
    return 0


def main() -> None:
    sys.exit(run())
