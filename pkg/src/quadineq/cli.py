"""Command-line front door: evaluation reports, batch audits, certification
runs, certificate verification, and counterexample search.

Every report embeds the toolkit version, the full effective configuration,
and the sign-resolution outcome, and is byte-identical across runs with the
same configuration and seed.  Exit status: 0 when all checks pass (or the
certificate is complete / verifies), 1 on a violation or incomplete result,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .certifier import Certificate, MalformedCertificate, certify, verify_certificate
from .geometry import (
    GeometryError,
    as_quadrilateral,
    configuration_from_json_dict,
    frame_of,
    metrics,
)
from .ioutil import dumps
from .kernel import RESIDUAL_PATHS, audit, audit_samples, edge_terms, residual
from .search import boundary_trend, minimize_residual

_SIGN_PROBE_SAMPLES = 256


class UsageError(Exception):
    """Usage error carrying a diagnostic for stderr (exit status 2)."""


def _load_json_argument(text: str, what: str) -> dict:
    """Parse an inline JSON value or, with a leading '@', a JSON file."""
    source = "<{}>".format(what)
    if text.startswith("@"):
        source = text[1:]
        try:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"malformed JSON in {source}: line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _sign_probe(seed: int) -> str:
    return audit_samples(seed, _SIGN_PROBE_SAMPLES, margin=0.05).sign_resolution


def _emit(report: dict, args, csv_rows=None) -> None:
    if args.format == "csv":
        if csv_rows is None:
            raise UsageError("csv output is not available for this subcommand")
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = dumps(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_dict(args, fields) -> dict:
    return {name: getattr(args, name.replace("-", "_")) for name in fields}


def _cmd_eval(args) -> int:
    if (args.points is None) == (args.frame is None):
        raise UsageError("eval needs exactly one of --points or --frame")
    doc = _load_json_argument(args.points or args.frame, "configuration")
    if args.points and "points" not in doc:
        doc = {"points": doc} if isinstance(doc, list) else doc
    if args.frame and "frame" not in doc:
        doc = {"frame": doc} if isinstance(doc, dict) and "p" in doc else doc
    try:
        config = configuration_from_json_dict(doc)
        quad = as_quadrilateral(config)
    except GeometryError as exc:
        raise UsageError(f"invalid configuration: {exc}")

    m = metrics(quad)
    terms = edge_terms(m)
    report_audit = audit(m, tol=args.tol)
    residuals = {path: float(residual(m, path)) for path in RESIDUAL_PATHS}
    metric_doc = {name: float(getattr(m, name)) for name in (
        "a", "b", "c", "d", "e", "f", "A123", "A124", "A134", "A234",
        "alpha1", "alpha2", "alpha3", "alpha4", "beta1", "beta2", "beta3",
        "beta4", "gamma1", "gamma2", "gamma3", "gamma4", "X", "Y", "W", "Wp")}
    report = {
        "version": __version__,
        "command": "eval",
        "config": _config_dict(args, ("points", "frame", "tol", "format")),
        "input": quad.to_json_dict(),
        "frame": frame_of(quad).normalize().to_json_dict()["frame"],
        "metrics": metric_doc,
        "edge_terms": {k: float(getattr(terms, k)) for k in
                       ("e12", "e23", "e34", "e41", "e13", "e24")},
        "residual": residuals,
        "audit": report_audit.to_json_dict(),
        "sign_resolution": report_audit.sign_resolution,
    }
    rows = [("quantity", "value")]
    rows += [(k, format(v, ".16e")) for k, v in metric_doc.items()]
    rows += [(f"edge_terms.{k}", format(float(getattr(terms, k)), ".16e"))
             for k in ("e12", "e23", "e34", "e41", "e13", "e24")]
    rows += [(f"residual.{k}", format(v, ".16e")) for k, v in residuals.items()]
    _emit(report, args, rows)
    return 0 if report_audit.passed() else 1


def _cmd_audit(args) -> int:
    report_audit = audit_samples(args.seed, args.samples, tol=args.tol,
                                 margin=args.margin, strategy=args.strategy)
    report = {
        "version": __version__,
        "command": "audit",
        "config": _config_dict(args, ("samples", "seed", "tol", "margin",
                                      "strategy", "format")),
        "audit": report_audit.to_json_dict(),
        "sign_resolution": report_audit.sign_resolution,
    }
    rows = [("check", "kind", "max_err", "min_slack", "pass")]
    for c in report_audit.checks:
        rows.append((c.id, c.kind,
                     "" if c.max_err is None else format(c.max_err, ".16e"),
                     "" if c.min_slack is None else format(c.min_slack, ".16e"),
                     "true" if c.passed else "false"))
    _emit(report, args, rows)
    return 0 if report_audit.passed() else 1


def _cmd_certify(args) -> int:
    if args.format == "csv":
        raise UsageError("certificates are JSON documents; csv is not available")
    cert = certify(margin=args.margin, target=args.target,
                   max_boxes=args.max_boxes)
    doc = cert.to_json_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc) + "\n")
    summary = {
        "version": __version__,
        "command": "certify",
        "config": _config_dict(args, ("margin", "target", "max_boxes", "out")),
        "complete": cert.complete,
        "c_star": cert.c_star,
        "box_count": cert.box_count,
        "leaves": len(cert.leaves),
        "sign_resolution": _sign_probe(0),
    }
    if not args.out:
        summary["certificate"] = doc
    sys.stdout.write(dumps(summary) + "\n")
    return 0 if (cert.complete and cert.c_star > 0.0) else 1


def _cmd_check_cert(args) -> int:
    if args.format == "csv":
        raise UsageError("check-cert reports are JSON documents; csv is not available")
    try:
        with open(args.certificate, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.certificate}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"malformed JSON in {args.certificate}: line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}")
    try:
        cert = Certificate.from_json_dict(doc)
        ok = verify_certificate(cert)
    except MalformedCertificate as exc:
        raise UsageError(f"malformed certificate: {exc}")
    report = {
        "version": __version__,
        "command": "check-cert",
        "config": {"certificate": args.certificate},
        "verified": ok,
        "margin": cert.margin,
        "c_star": cert.c_star,
        "complete": cert.complete,
        "leaves": len(cert.leaves),
        "sign_resolution": _sign_probe(0),
    }
    _emit(report, args)
    return 0 if ok else 1


def _cmd_search(args) -> int:
    margins = args.margin
    if len(margins) == 1:
        results = [minimize_residual(args.seed, starts=args.starts,
                                     margin=margins[0], budget=args.budget)]
    else:
        results = boundary_trend(args.seed, args.starts, margins, args.budget)
    report = {
        "version": __version__,
        "command": "search",
        "config": _config_dict(args, ("seed", "starts", "budget", "format")),
        "margins": list(margins),
        "runs": [r.to_json_dict() for r in results],
        "best_values": [r.best_value for r in results],
        "counterexample_candidates": sum(len(r.candidates) for r in results),
        "genuine_counterexamples": sum(len(r.genuine_candidates) for r in results),
        "sign_resolution": _sign_probe(args.seed),
    }
    rows = [("margin", "start", "start_value", "best_value", "iterations",
             "evaluations")]
    for r in results:
        for i, t in enumerate(r.trajectories):
            rows.append((r.margin, i, format(t.start_value, ".16e"),
                         format(t.best_value, ".16e"), t.iterations,
                         t.evaluations))
    _emit(report, args, rows)
    return 0 if report["genuine_counterexamples"] == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadineq",
        description="Verification toolkit for a degree-six inequality on "
                    "convex quadrilaterals.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one configuration")
    p_eval.add_argument("--points", help='inline JSON or @file: {"points": [[x,y] x4]}')
    p_eval.add_argument("--frame", help='inline JSON or @file: {"frame": {"p": [...], "w": w}}')
    p_eval.add_argument("--tol", type=float, default=1e-9)

    p_audit = sub.add_parser("audit", help="audit identities over seeded samples")
    p_audit.add_argument("--samples", type=int, default=1000)
    p_audit.add_argument("--seed", type=int, default=0)
    p_audit.add_argument("--tol", type=float, default=1e-9)
    p_audit.add_argument("--margin", type=float, default=0.01)
    p_audit.add_argument("--strategy", choices=("frame-uniform", "point-rejection"),
                         default="frame-uniform")

    p_cert = sub.add_parser("certify", help="branch-and-bound residual certification")
    p_cert.add_argument("--margin", type=float, default=0.1)
    p_cert.add_argument("--target", type=float, default=0.0)
    p_cert.add_argument("--max-boxes", type=int, default=1_000_000)

    p_check = sub.add_parser("check-cert", help="replay and verify a certificate")
    p_check.add_argument("certificate", help="path to a certificate JSON file")

    p_search = sub.add_parser("search", help="multi-start counterexample search")
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--starts", type=int, default=64)
    p_search.add_argument("--margin", type=float, nargs="+", default=[0.05])
    p_search.add_argument("--budget", type=int, default=2000)

    for p in (p_eval, p_audit, p_cert, p_check, p_search):
        p.add_argument("--out", help="write the report to this path")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


_HANDLERS = {
    "eval": _cmd_eval,
    "audit": _cmd_audit,
    "certify": _cmd_certify,
    "check-cert": _cmd_check_cert,
    "search": _cmd_search,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
