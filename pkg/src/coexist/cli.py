"""Command line front end: ``coexist green | verify | solve | indexlab``.

Exit codes: 0 success, 1 internal invariant failure, 2 bad input,
3 resonant coefficient, 4 Green's function of mixed sign, 5 no radii certificate,
6 solver did not converge, 7 index mismatch, 8 structural configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CoexistError, IndexMismatchError, InputError, NoConvergenceError, NotFoundError
from .green import build_green, green_residual, integrate_hill
from .hammerstein import solve_fixed_point
from .indexlab import SUITES, run_suite
from .problem_io import load
from .shells import find_radii, verify_radii


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    pf = load(args.problem)
    if getattr(args, "n", None) is not None:
        pf = pf.with_grid(args.n)
    if getattr(args, "density", None) is not None:
        pf.density = args.density
    if getattr(args, "search_lo", None) is not None:
        pf.search["lo"] = args.search_lo
    if getattr(args, "search_hi", None) is not None:
        pf.search["hi"] = args.search_hi
    if getattr(args, "tol", None) is not None:
        pf.solver = replace(pf.solver, tol=args.tol)
    return pf


def _certificate(pf):
    """Radii certificate from explicit radii or the sweep. Raises NotFoundError."""
    if pf.radii is not None:
        cert, ok = verify_radii(pf.problem, *pf.radii, density=pf.density)
        if not ok:
            raise NotFoundError(
                "supplied radii fail the band conditions",
                best_margins={f"component {r.component + 1} {r.kind}": r.min_margin
                              for r in cert.reports},
            )
        return cert
    return find_radii(pf.problem, pf.search["lo"], pf.search["hi"], pf.search["modes"],
                      pf.density)


def cmd_green(args) -> int:
    pf = _load(args)
    p = pf.problem
    report = {"period": p.T, "n": p.n, "components": []}
    kernels = []
    for i, a in enumerate(p.coeffs):
        fp = integrate_hill(a, p.n)
        k = build_green(a, p.n)
        kernels.append(k)
        probe = np.sin(2.0 * np.pi * 2.0 * k.nodes / p.T)
        report["components"].append({
            "component": i + 1,
            "trace": fp.trace,
            "wronskian_drift": float(np.abs(fp.wronskian - 1.0).max()),
            "sign": k.sign,
            "m": k.m,
            "M": k.M,
            "c": k.c,
            "probe_residual": green_residual(k, a, probe),
        })
    _emit(_json(report), args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["component", "t", "s", "G"])
            for i, k in enumerate(kernels):
                t = k.nodes
                for a in range(k.n):
                    for b in range(k.n):
                        w.writerow([i + 1, repr(float(t[a])), repr(float(t[b])),
                                    repr(float(k.values[a, b]))])
    return 0


def cmd_verify(args) -> int:
    pf = _load(args)
    pf.problem.check_sign_compatibility()
    try:
        cert = _certificate(pf)
    except NotFoundError as exc:
        _emit(_json({"status": "not_found", "message": str(exc),
                     "best_margins": exc.best_margins}), args.out)
        raise
    _emit(_json({"status": "certified", **cert.as_dict()}), args.out)
    return 0


def _solution_csv(t, pair) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "y"])
    for row in zip(t, *pair):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _result_doc(result, cert, status):
    return {
        "status": status,
        "residual": result.residual,
        "tol": result.tol,
        "norms": list(result.norms),
        "minima": [float(np.min(u)) for u in result.solution],
        "localization": list(result.localization),
        "cone": list(result.cone_ok),
        "clamp_active": result.clamp_activity,
        "iterations": result.iterations,
        "strategy": result.strategy,
        "start": result.start,
        "shell": {"r": list(cert.shell.r), "R": list(cert.shell.R),
                  "behavior": list(cert.shell.behavior)},
    }


def cmd_solve(args) -> int:
    pf = _load(args)
    pf.problem.check_sign_compatibility()
    cert = _certificate(pf)
    csv_path = args.csv or (str(Path(args.out).with_suffix(".csv")) if args.out else None)
    try:
        result = solve_fixed_point(pf.problem, cert.shell, pf.solver)
        status = "certified" if result.success else "uncertified"
    except NoConvergenceError as exc:
        if exc.best is not None:
            _emit(_json(_result_doc(exc.best, cert, "no_convergence")), args.out)
            if csv_path:
                Path(csv_path).write_text(_solution_csv(pf.problem.nodes, exc.best.solution))
        raise
    _emit(_json(_result_doc(result, cert, status)), args.out)
    if csv_path:
        Path(csv_path).write_text(_solution_csv(pf.problem.nodes, result.solution))
    if not result.success:
        raise NoConvergenceError("solution failed the localization or cone checks", best=result)
    return 0


def cmd_indexlab(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    failures = []
    report = []
    for name in names:
        for label, expected, computed in run_suite(name, args.steps):
            ok = expected == computed
            report.append({"suite": name, "check": label, "expected": expected,
                           "computed": computed, "pass": ok})
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {label}: expected {expected}, "
                  f"computed {computed}")
            if not ok:
                failures.append(f"{name}: {label}")
    if args.out:
        Path(args.out).write_text(_json(report))
    if failures:
        raise IndexMismatchError("index mismatch in " + "; ".join(failures))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coexist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", help="problem file (JSON)")
        p.add_argument("--n", type=int, help="grid size (overrides the file)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        return p

    g = problem_cmd("green", "Green's function report per component")
    g.add_argument("--csv", help="also dump kernel values as CSV")
    g.set_defaults(func=cmd_green)

    for name, func, help_ in (("verify", cmd_verify, "certify band conditions and radii"),
                              ("solve", cmd_solve, "certify radii, then solve in the shell")):
        p = problem_cmd(name, help_)
        p.add_argument("--density", type=int, help="band samples per axis (intervals)")
        p.add_argument("--search-lo", type=float, help="smallest radius tried")
        p.add_argument("--search-hi", type=float, help="largest radius tried")
        if name == "solve":
            p.add_argument("--tol", type=float, help="residual tolerance")
            p.add_argument("--csv", help="solution CSV path (default: --out with .csv)")
        p.set_defaults(func=func)

    ix = sub.add_parser("indexlab", help="run planar fixed point index suites")
    ix.add_argument("suite", choices=SUITES + ("all",))
    ix.add_argument("--steps", type=int, default=4096, help="boundary samples per edge")
    ix.add_argument("--out", help="write the JSON report here")
    ix.set_defaults(func=cmd_indexlab)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and InputError.exit_code
    try:
        return args.func(args)
    except CoexistError as exc:
        print(f"coexist: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
