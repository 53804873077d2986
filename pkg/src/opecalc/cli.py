"""Command line front end.

    opecalc ope --preset free-boson T T
    opecalc check-virasoro --preset bc-ghost --param L=2 T
    opecalc fuzz-identities --preset free-fermion --workers 4
    opecalc paper-examples --format json

Exit status: 0 when every check passes, 1 on a mathematical failure,
2 on usage, parse or file errors.
"""
from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .algebra import AlgebraDef
from .expr import NormalForm, OpecalcError, SingularPart, format_nf, format_scalar
from .identities import borcherds_residual, skew_residual
from .normal import derive
from .parser import parse_algebra, parse_rational
from .presets import PRESETS, load_preset
from .wick import check_primary, check_virasoro, nth_product, ope

PASS, FAIL, ERROR = "pass", "fail", "error"


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ rendering


def rational(x: Fraction) -> str:
    return format_scalar(Fraction(x))


def _derivative_prefix(k: int) -> str:
    return {0: "", 1: "d "}.get(k, f"d{{{k}}} ")


def render_field(nf: NormalForm, alg: AlgebraDef, times: str = "·", max_order: int = 2) -> str:
    """Render ``nf`` as a multiple of a named field or one of its derivatives
    when possible, otherwise in monomials."""
    if nf.is_zero():
        return "0"
    for name in alg.named_fields:
        for k in range(max_order + 1):
            target = derive(name, k, alg)
            ratio = nf.ratio_to(target)
            if ratio:
                body = f"{_derivative_prefix(k)}{name}"
                if ratio == 1:
                    return body
                if ratio == -1:
                    return f"-{body}"
                return f"{rational(ratio)}{times}{body}"
    return format_nf(nf, times)


def render_poles(sp: SingularPart, alg: AlgebraDef, times: str = "·") -> str:
    if not sp:
        return "{}"
    return " | ".join(f"{pole}: {render_field(nf, alg, times)}" for pole, nf in sp.items())


def poles_json(sp: SingularPart, alg: AlgebraDef) -> list:
    return [{"pole": pole, "field": render_field(nf, alg, "*")} for pole, nf in sp.items()]


# ------------------------------------------------------------------ algebra


def _params(items: list[str]) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects NAME=RATIONAL, got {item!r}")
        if name.strip() in out:
            raise UsageError(f"--param {name.strip()} given twice")
        out[name.strip()] = parse_rational(value.strip())
    return out


def _algebra(args) -> AlgebraDef:
    params = _params(args.param)
    if args.preset:
        return load_preset(args.preset, params)
    if args.algebra:
        try:
            text = Path(args.algebra).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read algebra file {args.algebra!r}: {exc.strerror or exc}") from None
        return parse_algebra(text, params or None)
    raise UsageError("choose an algebra with --preset NAME or --algebra FILE")


# ------------------------------------------------------------------ commands
# Each returns (status, results, text lines).


def cmd_ope(args, alg):
    res = ope(args.left, args.right, alg)
    results = {"poles": poles_json(res.singular, alg), "regular": render_field(res.regular0, alg, "*")}
    return PASS, results, [render_poles(res.singular, alg)]


def cmd_nprod(args, alg):
    nf = nth_product(args.left, args.n, args.right, alg)
    return PASS, {"n": args.n, "field": render_field(nf, alg, "*")}, [render_field(nf, alg)]


def _residual_report(res):
    status = PASS if res.ok else FAIL
    results = {"identity": res.name, "params": res.params, "residual": format_nf(res.residual)}
    return status, results, [f"residual = {format_nf(res.residual, '·')}"]


def cmd_check_borcherds(args, alg):
    return _residual_report(borcherds_residual(args.a, args.b, args.c, args.p, args.q, args.r, alg))


def cmd_check_skew(args, alg):
    return _residual_report(skew_residual(args.a, args.b, args.m, alg))


def _leftover(residuals: dict) -> list:
    return [{"pole": pole, "field": format_nf(nf)} for pole, nf in residuals.items()]


def cmd_check_virasoro(args, alg):
    chk = check_virasoro(args.t, alg)
    results = {"poles": poles_json(chk.table, alg), "residuals": _leftover(chk.residuals)}
    if chk.ok:
        results["central_charge"] = rational(chk.central_charge)
        return PASS, results, [f"c = {rational(chk.central_charge)}"]
    lines = ["not a Virasoro field", f"T T ~ {render_poles(chk.table, alg)}"]
    lines += [f"pole {pole} off by {format_nf(nf, '·')}" for pole, nf in chk.residuals.items()]
    return FAIL, results, lines


def cmd_check_primary(args, alg):
    chk = check_primary(args.t, args.phi, alg)
    results = {"poles": poles_json(chk.table, alg), "residuals": _leftover(chk.residuals),
               "weight": None if chk.weight is None else rational(chk.weight)}
    if chk.ok:
        return PASS, results, [f"h = {rational(chk.weight)}"]
    lines = ["not primary", f"T phi ~ {render_poles(chk.table, alg)}"]
    if chk.weight is not None:
        lines.append(f"second order pole: h = {rational(chk.weight)}")
    lines += [f"pole {pole} off by {format_nf(nf, '·')}" for pole, nf in chk.residuals.items()]
    return FAIL, results, lines


def cmd_fuzz(args, alg):
    from .fuzz import IDENTITIES, fuzz_identities

    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    if args.lo > args.hi:
        raise UsageError("--lo must not exceed --hi")
    rep = fuzz_identities(alg, args.lo, args.hi, args.workers)
    counts = {name: rep.counts.get(name, 0) for name in IDENTITIES}
    results = {"window": list(rep.window), "pool": list(rep.pool), "counts": counts,
               "failures": [f.as_dict() for f in rep.failures]}
    lines = [f"pool ({len(rep.pool)}): {', '.join(rep.pool)}"]
    lines += [f"{name}: {n} checked" for name, n in counts.items()]
    for f in rep.failures[:20]:
        lines.append(f"FAIL {f.identity} {' ; '.join(f.operands)} {f.params}: {f.residual}")
    if len(rep.failures) > 20:
        lines.append(f"... {len(rep.failures) - 20} more failures")
    lines.append(f"{len(rep.failures)} failures")
    return (PASS if rep.ok else FAIL), results, lines


def cmd_paper_examples(args, alg):
    from .paper_examples import run_examples

    opes, charges = run_examples()
    results = {"opes": [], "central_charges": []}
    lines = []
    for r in opes:
        alg_r = load_preset(_preset_of(r.block), r.params)
        tag = "ok  " if r.ok else "FAIL"
        params = "".join(f" {k}={rational(v)}" for k, v in r.params.items())
        lines.append(f"{tag} {r.block}{params}  {r.label}: {render_poles(r.actual, alg_r)}")
        if not r.ok:
            lines.append(f"     expected: {render_poles(r.expected, alg_r)}")
        results["opes"].append({"block": r.block, "pair": r.label, "params": _json_params(r.params),
                                "poles": poles_json(r.actual, alg_r), "ok": r.ok})
    for ch in charges:
        tag = "ok  " if ch.ok else "FAIL"
        params = "".join(f" {k}={rational(v)}" for k, v in ch.params.items())
        actual = "none" if ch.actual is None else rational(ch.actual)
        lines.append(f"{tag} {ch.preset}{params}  c = {actual}")
        results["central_charges"].append({"preset": ch.preset, "params": _json_params(ch.params),
                                           "expected": rational(ch.expected),
                                           "actual": None if ch.actual is None else rational(ch.actual),
                                           "ok": ch.ok})
    passed = all(r.ok for r in opes) and all(c.ok for c in charges)
    total = len(opes) + len(charges)
    failed = sum(not r.ok for r in opes) + sum(not c.ok for c in charges)
    lines.append(f"{total - failed}/{total} checks passed")
    return (PASS if passed else FAIL), results, lines


def _preset_of(block: str) -> str:
    return {"boson": "free-boson", "fermion": "free-fermion", "ghost": "bc-ghost"}[block]


def _json_params(params: dict) -> dict:
    return {k: rational(v) for k, v in params.items()}


# ------------------------------------------------------------------ parser


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    which = common.add_mutually_exclusive_group()
    which.add_argument("--preset", choices=PRESETS, help="built-in algebra")
    which.add_argument("--algebra", metavar="FILE", help="algebra definition file")
    common.add_argument("--param", action="append", default=[], metavar="NAME=RATIONAL",
                        help="set an algebra parameter (repeatable)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="opecalc", description="Exact OPEs in free-field vertex algebras.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("ope", parents=[common], help="singular part of A(z)B(w)")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_ope)

    p = sub.add_parser("nprod", parents=[common], help="n-th product A_(n)B for any integer n")
    p.add_argument("left")
    p.add_argument("n", type=_int)
    p.add_argument("right")
    p.set_defaults(func=cmd_nprod)

    p = sub.add_parser("check-borcherds", parents=[common], help="residual of one Borcherds identity")
    for name in ("a", "b", "c"):
        p.add_argument(name)
    for name in ("p", "q", "r"):
        p.add_argument(f"--{name}", type=_int, required=True)
    p.set_defaults(func=cmd_check_borcherds)

    p = sub.add_parser("check-skew", parents=[common], help="residual of skew symmetry")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--m", type=_int, required=True)
    p.set_defaults(func=cmd_check_skew)

    p = sub.add_parser("check-virasoro", parents=[common], help="central charge of a Virasoro field")
    p.add_argument("t")
    p.set_defaults(func=cmd_check_virasoro)

    p = sub.add_parser("check-primary", parents=[common], help="conformal weight of a primary field")
    p.add_argument("t")
    p.add_argument("phi")
    p.set_defaults(func=cmd_check_primary)

    p = sub.add_parser("fuzz-identities", parents=[common], help="exhaustive identity checks on small fields")
    p.add_argument("--lo", type=_int, default=-3, help="smallest index (default -3)")
    p.add_argument("--hi", type=_int, default=3, help="largest index (default 3)")
    p.add_argument("--workers", type=_int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("paper-examples", parents=[common], help="recompute the worked example tables")
    p.set_defaults(func=cmd_paper_examples, needs_algebra=False)
    return parser


def _emit(fmt: str, command: str, algebra: Optional[str], status: str, results, lines, ms: int, out) -> None:
    if fmt == "json":
        doc = {"command": command, "algebra": algebra, "results": results, "status": status, "ms": ms}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")


def run(argv: Optional[list] = None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    start = time.perf_counter()
    command = shlex.join(argv)
    fingerprint = None
    try:
        alg = None
        if getattr(args, "needs_algebra", True):
            alg = _algebra(args)
            fingerprint = alg.fingerprint()
        status, results, lines = args.func(args, alg)
    except (UsageError, OpecalcError, ValueError) as exc:
        ms = round((time.perf_counter() - start) * 1000)
        if args.format == "json":
            _emit("json", command, fingerprint, ERROR, {"error": str(exc)}, [], ms, out)
        err.write(f"opecalc: error: {exc}\n")
        return 2
    ms = round((time.perf_counter() - start) * 1000)
    _emit(args.format, command, fingerprint, status, results, lines, ms, out)
    return 0 if status == PASS else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
