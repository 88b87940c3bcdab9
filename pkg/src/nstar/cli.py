"""Command-line front end.

Commands: validate, norm, metric, conjugate, delta2, check, dual-norm,
demo (nonconvex | dualzero). Generator, space and function arguments take
inline shorthand (power:p=0.5, interval:L=1,N=1000, identity) or a path to
a JSON document (bare *.json path or @path). Exit codes: 0 all asserted
checks pass, 1 an asserted check failed, 2 usage or document error.
Machine-readable output (json, csv) is byte-stable for a fixed seed and
uses 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .calculus import complementary, delta2_solve, growth_factor, validate_nstar
from .documents import (
    fn_from_text,
    format_float,
    json_ready,
    load_json,
    parse_demo_doc,
    parse_fn_doc,
    parse_functional_doc,
    parse_suite_doc,
    phi_from_text,
    space_from_text,
)
from .dual import (
    dual_zero_halving,
    functional_norm_formula,
    halving_instance,
    nonconvexity_demo,
    operator_norm_bruteforce,
)
from .errors import DocumentError, NStarError
from .space import luxemburg_norm, metric
from .suite import CHECK_NAMES, default_doubling_constant, run_check_suite

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2


def _default_tol() -> float:
    raw = os.environ.get("NSTAR_DEFAULT_TOL")
    if raw is None:
        return 1e-9
    try:
        return float(raw)
    except ValueError:
        raise DocumentError(f"NSTAR_DEFAULT_TOL={raw!r} is not a number") from None


def _grid(args) -> np.ndarray:
    return np.geomspace(args.grid_lo, args.grid_hi, args.grid_points)


def _emit(payload: dict, table_lines: list[str], args) -> None:
    fmt = args.format
    if fmt == "table":
        text = "\n".join(table_lines) + "\n"
    elif fmt == "json":
        text = json.dumps(json_ready(payload), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = _to_csv(payload)
    else:  # pragma: no cover - argparse restricts choices
        raise DocumentError(f"unknown format {fmt!r}")
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)


def _to_csv(payload: dict) -> str:
    rows = payload.get("results")
    if not isinstance(rows, list):
        rows = [payload]
    buf = io.StringIO()
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for row in rows:
        writer.writerow([_csv_cell(row.get(k, "")) for k in keys])
    return buf.getvalue()


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return str(value)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> int:
    phi = phi_from_text(args.phi)
    report = validate_nstar(phi, _grid(args), seed=args.seed)
    results = [
        {"name": c.name, "pass": c.passed, "residual": c.residual, "note": c.note}
        for c in report.checks
    ]
    payload = {"command": "validate", "phi": args.phi, "results": results, "pass": report.passed}
    lines = [f"validate {args.phi}"]
    for c in report.checks:
        mark = "pass" if c.passed else "FAIL"
        lines.append(f"  {mark}  {c.name:36s} residual={c.residual:.3e}")
    lines.append(f"overall: {'pass' if report.passed else 'FAIL'}")
    _emit(payload, lines, args)
    return EXIT_OK if report.passed else EXIT_ASSERTION


def _cmd_norm(args) -> int:
    phi = phi_from_text(args.phi)
    space = space_from_text(args.space)
    f = fn_from_text(args.fn, space)
    result = luxemburg_norm(phi, space, f)
    payload = {
        "command": "norm",
        "value": result.value,
        "residual": result.lambda_residual,
        "iterations": result.iterations,
    }
    _emit(payload, [f"norm = {format_float(result.value)}"], args)
    return EXIT_OK


def _cmd_metric(args) -> int:
    phi = phi_from_text(args.phi)
    space = space_from_text(args.space)
    f = fn_from_text(args.fn, space)
    g = fn_from_text(args.fn2, space)
    value = metric(phi, space, f, g)
    payload = {"command": "metric", "value": value}
    _emit(payload, [f"metric = {format_float(value)}"], args)
    return EXIT_OK


def _cmd_conjugate(args) -> int:
    phi = phi_from_text(args.phi)
    phi_hat = complementary(phi, use_registered=not args.numeric)
    grid = _grid(args)
    values = np.asarray(phi_hat(grid), dtype=float)
    results = []
    reference = None
    if phi.registered_complementary is not None and args.numeric:
        reference = np.asarray(phi.registered_complementary()(grid), dtype=float)
    for i, t in enumerate(grid):
        rec = {"t": float(t), "value": float(values[i])}
        if reference is not None:
            rec["reference"] = float(reference[i])
            rec["rel_gap"] = float(abs(values[i] - reference[i]) / abs(reference[i]))
        results.append(rec)
    payload = {"command": "conjugate", "phi": args.phi, "numeric": args.numeric, "results": results}
    lines = [f"complementary of {args.phi}" + (" (numeric pipeline)" if args.numeric else "")]
    for rec in results:
        extra = f"  ref={format_float(rec['reference'])}" if "reference" in rec else ""
        lines.append(f"  t={format_float(rec['t'])}  value={format_float(rec['value'])}{extra}")
    _emit(payload, lines, args)
    return EXIT_OK


def _cmd_delta2(args) -> int:
    phi = phi_from_text(args.phi)
    cert = delta2_solve(phi, args.k0, _grid(args))
    payload = {
        "command": "delta2",
        "k0": cert.k0,
        "status": cert.status,
        "k_global": cert.k_global,
        "k_min": cert.k_min,
        "k_max": cert.k_max,
        "residual_max": cert.residual_max,
        "growth_factor": growth_factor(phi),
    }
    lines = [
        f"doubling certificate for {args.phi} (k0={format_float(cert.k0)})",
        f"  status   = {cert.status}",
        f"  k range  = [{format_float(cert.k_min)}, {format_float(cert.k_max)}]",
    ]
    if cert.k_global is not None:
        lines.append(f"  k_global = {format_float(cert.k_global)}")
    _emit(payload, lines, args)
    return EXIT_OK


def _cmd_check(args) -> int:
    if args.config:
        phi, space, checks, samples, seed, tol = parse_suite_doc(load_json(args.config, "--config"))
    else:
        if not args.phi or not args.space:
            raise DocumentError("check needs --phi and --space (or --config)")
        phi = phi_from_text(args.phi)
        space = space_from_text(args.space)
        checks = list(CHECK_NAMES) if args.suite == "all" else args.suite.split(",")
        samples = args.samples
        seed = args.seed
        tol = args.tol if args.tol is not None else _default_tol()
    records = run_check_suite(phi, space, checks, samples=samples, seed=seed, tol=tol)
    results = [r.to_record() for r in records]
    ok = all(r.passed is not False for r in records)
    payload = {
        "command": "check",
        "seed": seed,
        "samples": samples,
        "results": results,
        "pass": ok,
    }
    lines = [f"check suite (seed={seed}, samples={samples})"]
    for rec in records:
        mark = "skip" if rec.skipped else ("pass" if rec.passed else "FAIL")
        lines.append(
            f"  {mark}  {rec.name:18s} slack=[{format_float(rec.slack_min)}, {format_float(rec.slack_max)}]"
        )
        for note in rec.notes:
            lines.append(f"        note: {note}")
    lines.append(f"overall: {'pass' if ok else 'FAIL'}")
    _emit(payload, lines, args)
    return EXIT_OK if ok else EXIT_ASSERTION


def _cmd_dual_norm(args) -> int:
    phi = phi_from_text(args.phi)
    space = space_from_text(args.space)
    doc = load_json(args.functional, "--functional") if args.functional.endswith(".json") else None
    if doc is None:
        try:
            coeff = [float(v) for v in args.functional.split(",")]
        except ValueError:
            raise DocumentError("--functional: expected a .json path or comma-separated numbers") from None
        doc = {"coefficients": coeff}
    U = parse_functional_doc(doc, space, phi)
    formula = functional_norm_formula(U)
    brute = operator_norm_bruteforce(U, budget=args.budget, seed=args.seed)
    k = default_doubling_constant(phi)
    tol = args.tol if args.tol is not None else 1e-6
    ok = formula * (1 - tol) <= brute <= k * formula * (1 + tol) or formula == brute == 0.0
    payload = {
        "command": "dual-norm",
        "formula": formula,
        "bruteforce": brute,
        "k": k,
        "bracket_pass": ok,
    }
    lines = [
        f"coefficient-formula norm  S = {format_float(formula)}",
        f"brute-force unit-ball max   = {format_float(brute)}",
        f"bracket S <= max <= k*S (k={format_float(k)}): {'pass' if ok else 'FAIL'}",
    ]
    _emit(payload, lines, args)
    return EXIT_OK if ok else EXIT_ASSERTION


def _cmd_demo(args) -> int:
    phi = phi_from_text(args.phi)
    theta, iterations, epsilon = args.theta, args.iterations, args.epsilon
    kernel_doc = None
    if args.config:
        theta, iterations, epsilon, kernel_doc, _seed = parse_demo_doc(
            load_json(args.config, "--config")
        )
    if args.demo == "nonconvex":
        space_text = args.atoms or args.space
        if not space_text:
            raise DocumentError("demo nonconvex needs --atoms or --space")
        space = space_from_text(space_text)
        trace = nonconvexity_demo(phi, space, epsilon, args.n)
        results = [
            {"n": int(c), "modular": float(m)} for c, m in zip(trace.counts, trace.modulars)
        ]
        final = float(trace.modulars[-1])
        ok = bool(np.all(trace.modulars >= trace.epsilon * (1 - 1e-9)))
        payload = {
            "command": "demo-nonconvex",
            "epsilon": trace.epsilon,
            "results": results,
            "final_modular": final,
            "pass": ok,
        }
        lines = [
            f"averaged disjoint bumps, epsilon={format_float(trace.epsilon)}",
            f"  final modular at n={args.n}: {format_float(final)}",
            f"  lower bound modular >= epsilon: {'pass' if ok else 'FAIL'}",
        ]
        _emit(payload, lines, args)
        return EXIT_OK if ok else EXIT_ASSERTION
    if args.demo == "dualzero":
        space = space_from_text(args.space)
        if kernel_doc is not None:
            kernel = parse_fn_doc(kernel_doc, space, "--config kernel")
            f0 = fn_from_text(args.fn, space) if args.fn else halving_instance(phi, space)[0]
        elif args.fn and args.kernel:
            f0 = fn_from_text(args.fn, space)
            kernel = fn_from_text(args.kernel, space)
        elif args.fn or args.kernel:
            raise DocumentError("demo dualzero needs both --fn and --kernel, or neither")
        else:
            f0, kernel = halving_instance(phi, space)
        trace = dual_zero_halving(phi, space, f0, kernel, iterations, theta)
        bounds = trace.decay_bound()
        results = [
            {
                "iteration": s.iteration,
                "modular": s.modular,
                "functional_value": s.functional_value,
                "bound": float(bounds[i]),
            }
            for i, s in enumerate(trace.steps)
        ]
        ratio = trace.steps[-1].modular / trace.steps[0].modular
        drop = min(abs(s.functional_value) for s in trace.steps) - abs(
            trace.steps[0].functional_value
        )
        # cumulative product of the per-step bounds the run actually enforced
        cumulative_bound = float(np.prod([s.step_bound for s in trace.steps]))
        ok = bool(ratio <= cumulative_bound * (1 + 1e-9)) and drop >= -1e-6
        payload = {
            "command": "demo-dualzero",
            "theta": theta,
            "iterations": iterations,
            "modular_ratio": ratio,
            "cumulative_bound": cumulative_bound,
            "functional_drop": drop,
            "results": results,
            "pass": ok,
        }
        lines = [
            f"support halving, theta={format_float(theta)}, {iterations} iterations",
            f"  modular ratio rho_n/rho_0 = {format_float(ratio)}",
            f"  enforced cumulative bound = {format_float(cumulative_bound)}",
            f"  worst functional drop     = {format_float(drop)}",
            f"  decay within bound        : {'pass' if ok else 'FAIL'}",
        ]
        _emit(payload, lines, args)
        return EXIT_OK if ok else EXIT_ASSERTION
    raise DocumentError(f"unknown demo {args.demo!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, *, phi=True, space=False, fn=False) -> None:
    if phi:
        parser.add_argument("--phi", required=True, help="generator shorthand or JSON path")
    if space:
        parser.add_argument("--space", help="space shorthand or JSON path")
    if fn:
        parser.add_argument("--fn", help="function shorthand or JSON path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=None, help="override slack tolerance")
    parser.add_argument("--format", choices=("table", "json", "csv"), default="table")
    parser.add_argument("--out", help="also write the emitted report to this file")


def _add_grid(parser: argparse.ArgumentParser, lo=1e-3, hi=1e3, points=50) -> None:
    parser.add_argument("--grid-lo", type=float, default=lo)
    parser.add_argument("--grid-hi", type=float, default=hi)
    parser.add_argument("--grid-points", type=int, default=points)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nstar",
        description="Concave generators, their function spaces, and executable checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="run structural checks on a generator")
    _add_common(p)
    _add_grid(p, lo=1e-8, hi=1e8, points=33)
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("norm", help="Luxemburg quasi-norm of a function")
    _add_common(p, space=True, fn=True)
    p.set_defaults(handler=_cmd_norm)

    p = sub.add_parser("metric", help="modular distance between two functions")
    _add_common(p, space=True, fn=True)
    p.add_argument("--fn2", required=True, help="second function")
    p.set_defaults(handler=_cmd_metric)

    p = sub.add_parser("conjugate", help="evaluate the complementary generator on a grid")
    _add_common(p)
    _add_grid(p, lo=1e-3, hi=1e3, points=13)
    p.add_argument("--numeric", action="store_true", help="force the numeric conjugation pipeline")
    p.set_defaults(handler=_cmd_conjugate)

    p = sub.add_parser("delta2", help="solve the doubling relation on a grid")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--k0", type=float, default=20.0, help="doubling hypothesis constant (> 2)")
    p.set_defaults(handler=_cmd_delta2)

    p = sub.add_parser("check", help="run the inequality check suite")
    p.add_argument("--phi")
    p.add_argument("--space")
    p.add_argument("--suite", default="all", help="'all' or comma-separated check names")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--config", help="check-suite JSON document (overrides other flags)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("dual-norm", help="formula vs brute-force norm of an atomic functional")
    _add_common(p, space=True)
    p.add_argument("--functional", required=True, help="coefficients c1,c2,... or JSON path")
    p.add_argument("--budget", type=int, default=400)
    p.set_defaults(handler=_cmd_dual_norm)

    p = sub.add_parser("demo", help="constructive demonstrations")
    p.add_argument("demo", choices=("nonconvex", "dualzero"))
    _add_common(p, space=True, fn=True)
    p.add_argument("--atoms", help="atomic space shorthand (nonconvex)")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--kernel", help="kernel function for dualzero")
    p.add_argument("--config", help="demo configuration JSON document")
    p.set_defaults(handler=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.handler(args)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NStarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
