"""Command line front end.

Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 validation
failure, 4 computation precondition failed.  Set ``DGLUE_VERBOSE=1`` for
diagnostic logging on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import errors
from .exppoly import render
from .fibersum import GlueInput, glue_eval, predict_coefficient, sum_rules
from .kmseries import dd_eval, dx_eval
from .manifest import canonical, load, parse_class_expr, parse_glue_expr
from .qh2 import RingClass
from .verify import SECTIONS, run

log = logging.getLogger("dglue")

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_INVALID, EXIT_PRECONDITION = 0, 1, 2, 3, 4


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, errors.ParseError):
        return EXIT_PARSE
    if isinstance(exc, (errors.ValidationError, errors.GenusMismatch, errors.GenusUnsupported,
                        errors.NotSimpleType)):
        return EXIT_INVALID
    return EXIT_PRECONDITION


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_eval(args) -> int:
    m, s = load(args.manifold)
    alpha = parse_class_expr(args.cls, m)
    log.debug("alpha = %s", alpha)
    value = dx_eval(s, alpha) if args.combined else dd_eval(s, alpha)
    text = render(value)
    print(text)
    if args.json:
        _emit_json({"series": "combined" if args.combined else "structure",
                    "class": args.cls, "value": text})
    return EXIT_OK


def cmd_glue(args) -> int:
    m1, s1 = load(args.m1)
    m2, s2 = load(args.m2)
    inp = GlueInput(s1, s2, one_to_one=args.one_to_one)
    report = sum_rules(inp)
    doc = report.to_dict()
    if args.probe:
        p = parse_glue_expr(args.probe, m1, m2)
        value = glue_eval(inp, p["alpha"], p["beta"], t=p["t"], s=p["s"])
        doc["probe"] = {"expression": args.probe, "value": render(value)}
    top = report.topology
    print(f"fiber sum: euler {top.euler}, signature {top.signature}, b+ {top.b_plus}, "
          f"d0 parity {top.d0_parity}")
    for r in report.rules:
        print(f"  rule {r.case:11s} K~{list(r.fiber[0])} L~{list(r.fiber[1])}: sum = {r.total}")
    if args.probe:
        print(f"  probe {args.probe}: {doc['probe']['value']}")
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _mu_x(text: str | None):
    if not text:
        return None
    try:
        return RingClass([Fraction(x) for x in text.split(",")])
    except ValueError as exc:
        raise errors.ParseError(f"bad --mu-x value {text!r}") from exc


def cmd_verify(args) -> int:
    results = run(args.section, mu_x=_mu_x(args.mu_x))
    failed = 0
    for r in results:
        failed += not r.ok
        print(f"{'PASS' if r.ok else 'FAIL'} [{r.section}] {r.name}: {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if args.json:
        _emit_json([{"section": r.section, "name": r.name, "ok": r.ok, "detail": r.detail}
                    for r in results])
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def cmd_predict(args) -> int:
    value, status = predict_coefficient(args.genus)
    print(f"genus {args.genus}: +-{value} ({status})")
    if args.json:
        _emit_json({"genus": args.genus, "coefficient": value, "status": status})
    return EXIT_OK


def cmd_fmt(args) -> int:
    try:
        text = Path(args.manifold).read_text(encoding="utf-8")
    except OSError as exc:
        raise errors.ParseError(str(exc)) from exc
    sys.stdout.write(canonical(text))
    return EXIT_OK


def cmd_validate(args) -> int:
    m, _ = load(args.manifold)
    print(f"{m.name or args.manifold}: valid (d0 = {m.d0})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dglue", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a structure series on a class expression")
    e.add_argument("--manifold", required=True)
    e.add_argument("--class", dest="cls", required=True, help='e.g. "s*sigma + t*dbar"')
    e.add_argument("--combined", action="store_true", help="evaluate D_X = D^w + D^{w+Sigma}")
    e.add_argument("--json", action="store_true", help="also print a JSON block")
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("glue", help="basic classes of the fiber sum of two manifolds")
    g.add_argument("--m1", required=True)
    g.add_argument("--m2", required=True)
    g.add_argument("--probe", help='e.g. "u*m1.P + t*D + s*Sigma"')
    g.add_argument("--out", help="write the JSON report here instead of stdout")
    g.add_argument("--one-to-one", action="store_true",
                   help="every 1-cycle bounds a (-1)-disc on both sides")
    g.set_defaults(func=cmd_glue)

    v = sub.add_parser("verify", help="run the conformance checks")
    v.add_argument("--section", choices=SECTIONS + ("all",), default="all")
    v.add_argument("--json", action="store_true")
    v.add_argument("--mu-x", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("predict", help="gluing coefficient 2^(7g-9)")
    r.add_argument("--genus", type=int, required=True)
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_predict)

    f = sub.add_parser("fmt", help="print a description in canonical form")
    f.add_argument("manifold")
    f.set_defaults(func=cmd_fmt)

    c = sub.add_parser("validate", help="check a description against all hypotheses")
    c.add_argument("--manifold", required=True)
    c.set_defaults(func=cmd_validate)
    return p


def _setup_logging(verbose: bool) -> None:
    for h in list(log.handlers):
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    log.propagate = False


def main(argv: list[str] | None = None) -> int:
    _setup_logging(os.environ.get("DGLUE_VERBOSE", "") not in ("", "0"))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except errors.ValidationError as exc:
        for v in exc.violations:
            print(f"violation: {v}", file=sys.stderr)
        return EXIT_INVALID
    except errors.DGlueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
