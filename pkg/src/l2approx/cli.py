"""Command-line front end.

Subcommands: kernel, density, det, kappa, verify, ore.  Exit codes:
0 = converged / verified, 2 = indeterminate, 1 = error.  Exact values
are printed exactly (fractions as "p/q"); floats at 1e-12 formatting
precision, tagged with a provenance field.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import approx, spectra
from .groupring import GroupRingMatrix
from .groups import FolnerExhaustion, QuotientChain
from .orelocal import OreError, ore_solve
from .problemio import (Problem, ProblemError, format_float, json_default,
                        load_problem, parse_fraction)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INDETERMINATE = 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="l2approx",
        description="Approximate L2-invariants of group-ring matrices "
                    "via finite quotients and Folner sets.")
    ap.add_argument("--jobs", type=int, default=None,
                    help="parallel level analyses (default: cpu count)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--problem", required=True, help="problem JSON path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--levels", default=None,
                       help="a..b restricts to Folner/chain levels a through b")
        p.add_argument("--tol", default=None, help="rational tolerance, e.g. 1/1000")
        p.add_argument("--format", choices=("csv", "json"), default="json")

    for name, desc in (("kernel", "kernel-dimension approximation run"),
                       ("density", "spectral densities per level"),
                       ("det", "normalized log-determinants per level"),
                       ("kappa", "kappa report of the matrix")):
        common(sub.add_parser(name, help=desc))
    ver = sub.add_parser("verify", help="check a paper inequality on the problem")
    ver.add_argument("mode", choices=("det-bound", "continuity", "gap", "liouville"))
    common(ver)
    ore = sub.add_parser("ore", help="solve beta sigma = tau alpha over the group algebra")
    common(ore)
    return ap


def _apply_level_range(problem: Problem, spec: str | None):
    if spec is None:
        return problem.scheme
    try:
        a, b = spec.split("..")
        a, b = int(a), int(b)
    except ValueError:
        raise ProblemError("--levels", "expected a..b with integers")
    scheme = problem.scheme
    if isinstance(scheme, FolnerExhaustion):
        kept = tuple(k for k in scheme.levels if a <= k <= b)
        if not kept:
            raise ProblemError("--levels", "range keeps no levels")
        return FolnerExhaustion(scheme.group, kept)
    if isinstance(scheme, QuotientChain):
        kept = tuple(m for i, m in enumerate(scheme.maps) if a <= i <= b)
        if not kept:
            raise ProblemError("--levels", "range keeps no levels")
        return QuotientChain(kept, scheme.separating, scheme.class_tag)
    raise ProblemError("--levels", "problem has no scheme")


def _emit(payload: dict, args, default_name: str, csv_text: str | None = None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=json_default)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        Path(args.out, default_name + ".json").write_text(text + "\n")
        if csv_text is not None:
            Path(args.out, default_name + ".csv").write_text(csv_text)
    if getattr(args, "format", "json") == "csv" and csv_text is not None:
        print(csv_text, end="")
    else:
        print(text)


def _need_scheme(problem: Problem):
    if problem.scheme is None:
        raise ProblemError("$.scheme", "this command needs a scheme")
    return problem.scheme


def _run_csv_text(run) -> str:
    lines = ["level,N,dim,logdet,kappa,error_term,seconds"]
    for r in run.levels:
        logdet = "" if r.log_det is None else format_float(r.log_det)
        err = "" if r.error_term is None else str(r.error_term)
        lines.append(f"{r.level},{r.normalization},{r.dim_kernel},{logdet},"
                     f"{format_float(r.kappa_level)},{err},{r.seconds:.6f}")
    return "\n".join(lines) + "\n"


def cmd_kernel(problem: Problem, args) -> int:
    scheme = _apply_level_range(problem, args.levels)
    _need_scheme(problem)
    tol = parse_fraction(args.tol, "--tol") if args.tol else problem.tol
    run = approx.approximate_kernel_dim(problem.matrix, scheme, tol=tol, jobs=args.jobs)
    verdict = approx.check_atiyah_integrality(run, tol=tol)
    payload = run.as_json()
    payload["converged"] = run.converged(tol)
    payload["cauchy_delta"] = str(run.cauchy_delta())
    payload["tail_bound"] = str(run.tail_bound())
    payload["integrality"] = verdict.as_json()
    _emit(payload, args, "kernel_run", csv_text=_run_csv_text(run))
    return EXIT_OK if run.converged(tol) else EXIT_INDETERMINATE


def cmd_density(problem: Problem, args) -> int:
    scheme = _apply_level_range(problem, args.levels)
    _need_scheme(problem)
    run = approx.approximate_kernel_dim(problem.matrix, scheme, jobs=args.jobs,
                                        keep_densities=True)
    rows = []
    for rec in run.levels:
        for lam in rec.density.jumps():
            rows.append((rec.level, rec.normalization, lam, rec.density.value(lam)))
    csv_text = "level,N,lambda,F\n" + "".join(
        f"{lvl},{n},{format_float(lam)},{format_float(f)}\n" for lvl, n, lam, f in rows)
    payload = {"levels": [
        {"level": lvl, "N": n, "lambda": format_float(lam), "F": format_float(f)}
        for lvl, n, lam, f in rows], "provenance": "float"}
    _emit(payload, args, "density", csv_text=csv_text)
    return EXIT_OK


def cmd_det(problem: Problem, args) -> int:
    scheme = _apply_level_range(problem, args.levels)
    _need_scheme(problem)
    run = approx.approximate_kernel_dim(problem.matrix, scheme, jobs=args.jobs)
    payload = {"levels": [{"level": r.level, "N": r.normalization,
                           "logdet": r.log_det, "dim": str(r.dim_kernel),
                           "provenance": "float"}
                          for r in run.levels]}
    _emit(payload, args, "logdet")
    return EXIT_OK


def cmd_kappa(problem: Problem, args) -> int:
    report = problem.matrix.kappa().as_json()
    report["provenance"] = "exact" if problem.matrix.tag != "float" else "float"
    _emit(report, args, "kappa")
    return EXIT_OK


def cmd_verify(problem: Problem, args) -> int:
    mode = args.mode
    if mode in ("det-bound", "continuity", "gap"):
        _need_scheme(problem)
        scheme = _apply_level_range(problem, args.levels)
    if mode == "det-bound":
        report = approx.verify_det_bound(problem.matrix, scheme, jobs=args.jobs)
        _emit(report.as_json(), args, "det_bound")
        return EXIT_OK if report.holds else EXIT_INDETERMINATE
    if mode == "continuity":
        report = approx.verify_algebraic_continuity(problem.matrix, scheme, jobs=args.jobs)
        _emit(report.as_json(), args, "continuity")
        return EXIT_OK if report.equal else EXIT_INDETERMINATE
    if mode == "gap":
        extra = problem.extra.get("interval")
        if not (isinstance(extra, list) and len(extra) == 2):
            raise ProblemError("$.interval", "gap verification needs [lo, hi]")
        report = approx.spectrum_gap_check(problem.matrix, scheme,
                                           float(extra[0]), float(extra[1]))
        _emit(report.as_json(), args, "gap")
        return EXIT_OK if report.gap_confirmed else EXIT_INDETERMINATE
    if mode == "liouville":
        n_max = int(problem.extra.get("n_max", 5))
        approximants = approx.liouville_constant_approximants(n_max)
        admissible = [a for a in approximants if a[0] >= 2]
        if not admissible:
            print("no admissible n >= 2", file=sys.stderr)
            return EXIT_INDETERMINATE
        terms = max(6, n_max + 1)
        interval = approx.liouville_constant(terms)
        cert = approx.liouville_exclusion(problem.matrix, interval, approximants)
        _emit(cert.as_json(), args, "liouville")
        return EXIT_OK if cert.decreasing else EXIT_INDETERMINATE
    raise ProblemError("mode", f"unknown verify mode {mode!r}")


def cmd_ore(problem: Problem, args) -> int:
    raw = problem.extra
    if "alpha" not in raw or "sigma" not in raw:
        raise ProblemError("$.alpha/$.sigma", "ore needs alpha and sigma matrices")
    alpha_m = GroupRingMatrix.from_json(raw["alpha"])
    sigma_m = GroupRingMatrix.from_json(raw["sigma"])
    if alpha_m.rows != 1 or alpha_m.cols != 1 or sigma_m.rows != 1 or sigma_m.cols != 1:
        raise ProblemError("$.alpha/$.sigma", "ore operates on 1x1 matrices (ring elements)")
    sol = ore_solve(alpha_m.entries[0][0], sigma_m.entries[0][0])
    payload = {
        "level": sol.level,
        "support_size": len(sol.support),
        "counting_lhs": sol.counting_lhs,
        "counting_ok": sol.counting_ok,
        "equations": sol.equations,
        "unknowns": sol.unknowns,
        "beta": {str(g): str(c) for g, c in sol.beta.terms},
        "tau": {str(g): str(c) for g, c in sol.tau.terms},
        "residual_zero": True,
        "provenance": "exact",
    }
    _emit(payload, args, "ore")
    return EXIT_OK


COMMANDS = {"kernel": cmd_kernel, "density": cmd_density, "det": cmd_det,
            "kappa": cmd_kappa, "verify": cmd_verify, "ore": cmd_ore}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = load_problem(args.problem)
        code = COMMANDS[args.command](problem, args)
    except ProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
