"""Command-line frontend.

    sugracheck check <file> [--anomaly] [--sign-convention=paper|bbs] [--tol=T]
                            [--report=PATH] [--format=json|table]
    sugracheck identities <suite> [--seed=N] [--trials=N]
    sugracheck reduce <iia-file> [--fiber-length=L]

Exit codes: 0 pass, 1 residual failure, 2 input error. Probe points are
evaluated by ``SUGRACHECK_WORKERS`` worker processes (default 1).
"""

import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import identities as suites
from .bgspec import SpecError, build_background, load_document, locate, parse_spec
from .eom11 import residuals_11
from .eomiia import residuals_iia
from .eomiib import residuals_iib, residuals_iib_symmetric
from .fields import BackgroundError, ResidualReport
from .patchcalc import ReducedAccuracyWarning

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
WORKERS_ENV = "SUGRACHECK_WORKERS"
ANALYTIC_TOL = 1e-8
PATCH_TOL = 1e-5


class InputError(Exception):
    pass


def worker_count():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def _fmt(v):
    """Float rounded to 7 significant digits so reports are byte-stable."""
    return float(f"{float(v):.6e}")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _point_report(doc, source, flags, index):
    """Residual report at one probe point (rebuilt from the document in the worker)."""
    spec = parse_spec(doc, source=source)
    bg = build_background(spec)
    point = spec.points[index]
    tol = flags["tol"]
    overrides = dict(spec.tolerances)
    theory = spec.theory
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ReducedAccuracyWarning)
        if theory == "m11":
            return residuals_11(bg, [point], anomaly=flags["anomaly"],
                                sign_convention=flags["sign_convention"], tol=tol,
                                tolerances=overrides)
        if theory.startswith("iia"):
            return residuals_iia(bg, [point], tol=tol, tolerances=overrides)
        if theory == "iib-symmetric":
            return residuals_iib_symmetric(bg, [point], tol=tol, tolerances=overrides)
        return residuals_iib(bg, [point], tol=tol, tolerances=overrides)


def run_check(doc, source, flags, workers=1):
    """Merge per-point reports in probe-point order."""
    spec = parse_spec(doc, source=source)
    build_background(spec)      # surface input errors before dispatching
    npts = len(spec.points)
    if workers > 1 and npts > 1:
        with ProcessPoolExecutor(max_workers=min(workers, npts)) as pool:
            parts = list(pool.map(_point_report, [doc] * npts, [source] * npts,
                                  [flags] * npts, range(npts)))
    else:
        parts = [_point_report(doc, source, flags, i) for i in range(npts)]
    rep = ResidualReport(parts[0].theory, flags["tol"], tolerances=dict(parts[0].tolerances))
    for i, r in enumerate(parts):
        for k, v in r.residuals.items():
            rep.record(k, v, i)
        for note in r.notes:
            if note not in rep.notes:
                rep.notes.append(note)
    unknown = sorted(set(spec.tolerances) - set(rep.residuals))
    if unknown:
        raise SpecError(f"no equation named {unknown[0]!r} for theory {spec.theory}",
                        f"field tolerances.{unknown[0]}")
    return spec, rep


def check_document(spec, rep, flags):
    """Structured report; the key set depends only on the theory."""
    worst = rep.worst()
    body = rep.to_dict()
    return {
        "command": "check",
        "input": os.path.basename(spec.source),
        "theory": spec.theory,
        "mode": "analytic" if spec.analytic else "patch",
        "probe_points": len(spec.points),
        "options": {"anomaly": flags["anomaly"], "sign_convention": flags["sign_convention"],
                    "tolerance": flags["tol"]},
        "passed": rep.passed,
        "exit_code": EXIT_PASS if rep.passed else EXIT_FAIL,
        "worst": {"equation": worst, "value": _fmt(rep.residuals[worst]),
                  "tolerance": rep.tol(worst), "point": rep.worst_point[worst]},
        "residuals": {k: {"value": _fmt(v["value"]), "tolerance": v["tolerance"],
                          "pass": v["pass"], "worst_point": v["worst_point"]}
                      for k, v in body["residuals"].items()},
        "notes": body["notes"],
    }


def format_table(rows, header, title=None, footer=None):
    """Aligned plain-text table."""
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = [title] if title else []
    for j, r in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    if footer:
        lines.append(footer)
    return "\n".join(lines) + "\n"


def check_table(doc):
    rows = [[k, f"{v['value']:.3e}", f"{v['tolerance']:.1e}", "ok" if v["pass"] else "FAIL",
             v["worst_point"]] for k, v in doc["residuals"].items()]
    title = (f"{doc['input']}: theory {doc['theory']} ({doc['mode']}, "
             f"{doc['probe_points']} probe point{'s' if doc['probe_points'] != 1 else ''})")
    footer = "result: " + ("PASS" if doc["passed"] else "FAIL")
    for note in doc["notes"]:
        footer += f"\nnote: {note}"
    return format_table(rows, ["equation", "residual", "tolerance", "status", "point"],
                        title, footer)


def _emit(doc, text_fn, fmt, report):
    out = json.dumps(doc, indent=2) + "\n" if fmt == "json" else text_fn(doc)
    sys.stdout.write(out)
    if report:
        try:
            with open(report, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, indent=2) + "\n")
            with open(report + ".txt", "w", encoding="utf-8") as fh:
                fh.write(text_fn(doc))
        except OSError as exc:
            raise InputError(f"cannot write report {report}: {exc.strerror}") from None


def cmd_check(args):
    doc, text = load_document(args.file)
    spec = parse_spec(doc, text, source=args.file)    # diagnostics with line numbers
    if args.tol is not None and not args.tol > 0:
        raise InputError("--tol must be positive")
    flags = {"anomaly": bool(args.anomaly or spec.options.get("anomaly", False)),
             "sign_convention": args.sign_convention
             or spec.options.get("sign_convention", "paper"),
             "tol": args.tol if args.tol is not None
             else (ANALYTIC_TOL if spec.analytic else PATCH_TOL)}
    if flags["anomaly"] and spec.theory != "m11":
        raise SpecError("the anomaly term exists only in eleven dimensions", "option --anomaly")
    try:
        spec, rep = run_check(doc, args.file, flags, worker_count())
    except SpecError as exc:
        raise locate(exc, text) from None
    out = check_document(spec, rep, flags)
    if flags["sign_convention"] != "paper" and spec.theory != "m11":
        out["notes"].append("sign convention only affects the eleven-dimensional Maxwell equation")
    _emit(out, check_table, args.format, args.report)
    if not rep.passed:
        w = out["worst"]
        print(f"worst offender: {w['equation']} = {w['value']:.3e} "
              f"(tolerance {w['tolerance']:.1e}) at probe point {w['point']}", file=sys.stderr)
    return out["exit_code"]


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def identities_table(doc):
    rows = [[k, f"{v['passed']}/{v['trials']}", v["max_deviation"]]
            for k, v in doc["identities"].items()]
    return format_table(rows, ["identity", "passed", "max deviation"],
                        f"suite {doc['suite']} (seed {doc['seed']}, {doc['trials']} trials)",
                        "result: " + ("PASS" if doc["passed"] else "FAIL"))


def cmd_identities(args):
    if args.trials < 1:
        raise InputError("--trials must be positive")
    results = suites.run_suite(args.suite, args.seed, args.trials)
    doc = {"command": "identities", "suite": args.suite, "seed": args.seed,
           "trials": args.trials, "identities": results,
           "passed": all(v["passed"] == v["trials"] for v in results.values())}
    _emit(doc, identities_table, args.format, args.report)
    return EXIT_PASS if doc["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------

def reduction_table(doc):
    rows = []
    for section, body in doc["sections"].items():
        for k, v in body.items():
            val = f"{v['value']:.3e}" if "value" in v else "exact"
            rows.append([section, k, val, "ok" if v["pass"] else "FAIL"])
    return format_table(rows, ["section", "check", "residual", "status"],
                        f"{doc['input']}: circle lift (fiber length {doc['fiber_length']}, "
                        f"sign convention {doc['sign_convention']})",
                        "result: " + ("PASS" if doc["passed"] else "FAIL"))


def cmd_reduce(args):
    from .reduction import (build_gm, chern_simons_check, connection_reduction_check,
                            field_strength_reduce, killing_reduction_check,
                            lagrangian_reduction_check, metric_checks, random_killing_data)
    doc, text = load_document(args.file)
    spec = parse_spec(doc, text, source=args.file)
    if spec.theory != "iia-string" or spec.analytic:
        raise SpecError("reduce needs a string-frame IIA background on a coordinate chart",
                        "field theory")
    if not spec.potentials:
        raise SpecError("reduce needs polynomial potentials B2, C1, C3", "field potentials")
    stanza = spec.options.get("reduction", {})
    bbs = args.sign_convention == "bbs" if args.sign_convention else stanza.get("bbs", False)
    L = args.fiber_length if args.fiber_length is not None else stanza.get("fiber_length", 1.0)
    if L <= 0:
        raise InputError("--fiber-length must be positive")
    try:
        bg = build_background(spec)
    except SpecError as exc:
        raise locate(exc, text) from None
    rd = build_gm(bg, bbs=bbs, fiber_length=L, kappa11=stanza.get("kappa11"))
    pts = spec.points
    sections = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ReducedAccuracyWarning)
        for name, fn in (("metric", metric_checks), ("connection", connection_reduction_check),
                         ("field_strength", field_strength_reduce),
                         ("lagrangian", lagrangian_reduction_check)):
            r = fn(rd, pts)
            sections[name] = {k: {"value": _fmt(r.residuals[k]), "tolerance": r.tol(k),
                                  "pass": r.ok(k)} for k in r.residuals}
    cs = chern_simons_check(rd.C1, rd.B2, rd.C3)
    sections["chern_simons"] = {k: {"pass": bool(v)} for k, v in cs.items()}
    rng = np.random.default_rng(args.seed)
    kill = {}
    for _ in range(args.trials):
        for k, v in killing_reduction_check(random_killing_data(rng), bbs=bbs).items():
            kill[k] = kill.get(k, True) and bool(v)
    sections["killing"] = {k: {"pass": v} for k, v in kill.items()}
    passed = all(v["pass"] for s in sections.values() for v in s.values())
    out = {"command": "reduce", "input": os.path.basename(args.file), "fiber_length": L,
           "sign_convention": "bbs" if bbs else "paper", "probe_points": len(pts),
           "killing_configurations": args.trials, "passed": passed,
           "exit_code": EXIT_PASS if passed else EXIT_FAIL, "sections": sections,
           "notes": list(dict.fromkeys(rd.notes))}
    _emit(out, reduction_table, args.format, args.report)
    return out["exit_code"]


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="sugracheck",
                                description="Residual and identity checks for supergravity "
                                            "backgrounds.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--format", choices=["table", "json"], default="table")
        q.add_argument("--report", metavar="PATH",
                       help="write the JSON report to PATH and the table to PATH.txt")

    c = sub.add_parser("check", help="run the theory's residual suite on a background file")
    c.add_argument("file")
    c.add_argument("--anomaly", action="store_true", help="include the X8 anomaly term")
    c.add_argument("--sign-convention", choices=["paper", "bbs"], default=None)
    c.add_argument("--tol", type=float, default=None, help="default residual tolerance")
    common(c)

    i = sub.add_parser("identities", help="run a randomized identity suite")
    i.add_argument("suite", choices=suites.SUITES)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--trials", type=int, default=20)
    common(i)

    r = sub.add_parser("reduce", help="circle lift of a string-frame IIA background")
    r.add_argument("file")
    r.add_argument("--fiber-length", type=float, default=None)
    r.add_argument("--sign-convention", choices=["paper", "bbs"], default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=3,
                   help="rational configurations for the Killing-operator lift")
    common(r)
    return p


COMMANDS = {"check": cmd_check, "identities": cmd_identities, "reduce": cmd_reduce}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SpecError, InputError, BackgroundError) as exc:
        src = getattr(args, "file", None)
        prefix = f"{src}: " if src else ""
        print(f"input error: {prefix}{exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
