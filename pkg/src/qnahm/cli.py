"""Command-line front end: verify, expand, list, bailey.

Exit codes: 0 everything verified; 1 at least one coefficient mismatch;
2 parse error in a .qid file; 3 invalid spec (positivity, arity, ranges,
unknown case); 4 internal insufficiency (e.g. a Bailey prefix too short).
Errors dominate mismatches when both occur in one run.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bailey as bailey_mod
from . import dsl
from .errors import InsufficientLengthError, QnahmError, SingularParameterError
from .identities import CATALOG, run_case, run_catalog_case, verify_batch
from .qseries import serialize_series


def _parse_frac(text: str) -> Fraction:
    return Fraction(text)


def _maybe_int(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _gather_params(args) -> dict:
    out = {}
    for flag, key in (
        ("k", "k"), ("lam", "lam"), ("a", "a"), ("s", "s"), ("i", "i"),
        ("n", "N"), ("r", "r"), ("which", "which"), ("shift", "shift"),
        ("imax", "imax"), ("jmax", "jmax"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            out[key] = v
    return out


def _add_case_flags(p):
    p.add_argument("--k", type=int, help="rank parameter")
    p.add_argument("--lambda", dest="lam", type=_parse_frac, help="shift parameter (rational)")
    p.add_argument("--a", type=_parse_frac, help="deformation parameter (rational)")
    p.add_argument("--s", type=int, help="odd-moduli family index")
    p.add_argument("--i", type=int, help="multisum transform index")
    p.add_argument("--n", type=int, help="x-degree slice / rectangle offset")
    p.add_argument("--r", type=int, help="parity class (0 or 1)")
    p.add_argument("--which", type=_maybe_int, help="identity selector (1..4 or even/odd/full)")
    p.add_argument("--shift", type=int, help="triple-product tilt")
    p.add_argument("--imax", type=int, help="lifting-identity grid bound")
    p.add_argument("--jmax", type=int, help="lifting-identity grid bound")


def _exit_code(reports) -> int:
    code = 0
    for r in reports:
        if r.status == "error":
            kind = r.extra.get("error_kind", "")
            code = max(code, 4 if kind == "InsufficientLengthError" else 3)
        elif r.status == "mismatch":
            code = max(code, 1)
    return code


def _emit_reports(reports, report_format):
    if report_format == "json":
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            print(r.line())


def _run_file_case(payload):
    text, index, order, raw = payload
    res = dsl.parse_spec(text)
    decl = res.document.items[index]
    try:
        case = dsl.decl_to_case(decl)
    except QnahmError as exc:
        from .identities import VerifyReport

        stated = order if order is not None else decl.get("order", 0)
        return VerifyReport(decl.name, {}, Fraction(stated), "error", None, 0.0,
                            {"error": str(exc), "error_kind": type(exc).__name__})
    return run_case(case, order, raw=raw)


def cmd_verify(args) -> int:
    order = Fraction(args.order) if args.order is not None else None
    if args.file:
        try:
            text = open(args.file, encoding="utf-8").read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        res = dsl.parse_spec(text)
        if not res.ok:
            for d in res.diagnostics:
                print(d, file=sys.stderr)
            return 2
        payloads = [(text, i, order, args.raw_eta) for i in range(len(res.document.items))]
        if args.jobs > 1 and len(payloads) > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                reports = list(pool.map(_run_file_case, payloads))
        else:
            reports = [_run_file_case(p) for p in payloads]
        _emit_reports(reports, args.report)
        return _exit_code(reports)

    params = _gather_params(args)
    if args.builtin == "all":
        if params:
            print("error: case parameters cannot be combined with --builtin all", file=sys.stderr)
            return 3
        reports = verify_batch(raw=args.raw_eta, jobs=args.jobs,
                               orders={n: order for n in CATALOG} if order else None)
    else:
        reports = [run_catalog_case(args.builtin, params, order, raw=args.raw_eta)]
    _emit_reports(reports, args.report)
    return _exit_code(reports)


def cmd_expand(args) -> int:
    order = Fraction(args.order) if args.order is not None else None
    if args.file:
        try:
            text = open(args.file, encoding="utf-8").read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        res = dsl.parse_spec(text)
        if not res.ok:
            for d in res.diagnostics:
                print(d, file=sys.stderr)
            return 2
        decls = res.document.items
        if args.name:
            decls = [d for d in decls if d.name == args.name]
            if not decls:
                print(f"error: no identity named {args.name!r} in {args.file}", file=sys.stderr)
                return 3
        try:
            case = dsl.decl_to_case(decls[0])
        except QnahmError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    else:
        entry = CATALOG.get(args.builtin)
        if entry is None or entry.build is None:
            print(f"error: no expandable builtin {args.builtin!r}", file=sys.stderr)
            return 3
        merged = dict(entry.defaults)
        merged.update(_gather_params(args))
        try:
            case = entry.build(**merged)
        except (QnahmError, TypeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    trunc = case.trunc_for(order)
    try:
        value = case.lhs_value(trunc) if args.side == "lhs" else case.rhs_value(trunc)
    except QnahmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        kind = type(exc).__name__
        return 4 if kind == "InsufficientLengthError" else 3
    records = serialize_series(value)
    if args.report == "json":
        print(json.dumps({
            "name": case.name,
            "side": args.side,
            "trunc": {"num": trunc.numerator, "den": trunc.denominator},
            "records": records,
        }))
    else:
        print(f"{case.name} {args.side} below q^{trunc}:")
        for d, en, ed, cn, cd in records:
            e = f"{en}" if ed == 1 else f"{en}/{ed}"
            c = f"{cn}" if cd == 1 else f"{cn}/{cd}"
            xpart = "" if d == 0 else f" * x^{d}"
            print(f"  {c} * q^{e}{xpart}")
    return 0


def cmd_list(args) -> int:
    rows = []
    for name, entry in CATALOG.items():
        defaults = ", ".join(f"{k}={v}" for k, v in entry.defaults.items()) or "-"
        rows.append((name, defaults, entry.description))
    width = max(len(r[0]) for r in rows)
    dwidth = max(len(r[1]) for r in rows)
    for name, defaults, desc in rows:
        print(f"{name:<{width}}  {defaults:<{dwidth}}  {desc}")
    return 0


def cmd_bailey(args) -> int:
    order = Fraction(args.order)
    length = args.m if args.m is not None else max(8, bailey_mod.required_length(args.e or 0, order))
    try:
        pair = bailey_mod.make_builtin_pair(
            args.pair, length, order, e=args.e or 0, k=args.k, a=args.a,
        )
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (TypeError, QnahmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    chain = [s for s in (args.chain or "").split(",") if s.strip()]
    out = {"pair": args.pair, "param_exp": str(pair.param_exp), "length": pair.length,
           "order": str(order), "chain": chain}
    code = 0
    try:
        pair = bailey_mod.apply_chain(pair, chain)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SingularParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    out["param_exp_after"] = str(pair.param_exp)
    res = bailey_mod.verify_bailey(pair)
    out["verify"] = {"status": res.status}
    if res.mismatch is not None:
        out["verify"]["at_n"] = res.mismatch_at
        out["verify"]["x_degree"] = res.mismatch.x_degree
        out["verify"]["exponent"] = str(res.mismatch.exponent)
        code = 1
    if args.limit:
        try:
            lres = bailey_mod.limit_identity(pair)
            out["limit"] = {"status": lres.status}
            if lres.mismatch is not None:
                out["limit"]["x_degree"] = lres.mismatch.x_degree
                out["limit"]["exponent"] = str(lres.mismatch.exponent)
                code = max(code, 1)
        except InsufficientLengthError as exc:
            print(f"error: {exc} (required length {exc.required_length})", file=sys.stderr)
            return 4
    if args.report == "json":
        print(json.dumps(out, indent=2))
    else:
        steps = ",".join(chain) if chain else "(none)"
        print(f"pair {args.pair} (a = q^{out['param_exp']}), chain {steps} -> a = q^{out['param_exp_after']}")
        print(f"defining relation: {out['verify']['status']}")
        if "limit" in out:
            print(f"limiting identity: {out['limit']['status']}")
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qnahm",
        description="Exact verification of Nahm-sum / theta / product identities.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="verify builtin catalog cases or a .qid file")
    src = pv.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="catalog entry name, or 'all'")
    src.add_argument("--file", help="identity-spec (.qid) file")
    _add_case_flags(pv)
    pv.add_argument("--order", type=int, help="truncation order on the identity's natural grid")
    pv.add_argument("--raw-eta", action="store_true", help="compare with eta prefactors multiplied back in")
    pv.add_argument("--report", choices=("text", "json"), default="text")
    pv.add_argument("--jobs", type=int, default=1, help="run cases concurrently")
    pv.set_defaults(func=cmd_verify)

    pe = sub.add_parser("expand", help="print one side of an identity as a series")
    esrc = pe.add_mutually_exclusive_group(required=True)
    esrc.add_argument("--builtin", help="catalog entry name")
    esrc.add_argument("--file", help="identity-spec (.qid) file")
    pe.add_argument("--name", help="identity name inside the file")
    _add_case_flags(pe)
    pe.add_argument("--side", choices=("lhs", "rhs"), default="lhs")
    pe.add_argument("--order", type=int, help="truncation order")
    pe.add_argument("--report", choices=("text", "json"), default="text")
    pe.set_defaults(func=cmd_expand)

    pl = sub.add_parser("list", help="list the builtin catalog")
    pl.set_defaults(func=cmd_list)

    pb = sub.add_parser("bailey", help="construct a pair, apply a transform chain, verify")
    pb.add_argument("--pair", required=True, help=f"one of {sorted(bailey_mod.BUILTIN_PAIRS)}")
    pb.add_argument("--e", type=_parse_frac, help="parameter exponent for the unit pair")
    pb.add_argument("--k", type=int, help="rank for the theta pairs")
    pb.add_argument("--a", type=_parse_frac, help="deformation parameter for the theta pairs")
    pb.add_argument("--m", type=int, help="prefix length (defaults to what the order needs)")
    pb.add_argument("--order", type=int, default=30, help="truncation order")
    pb.add_argument("--chain", help="comma-separated transforms: s1, lift, reduce")
    pb.add_argument("--limit", action="store_true", help="also check the limiting identity")
    pb.add_argument("--report", choices=("text", "json"), default="text")
    pb.set_defaults(func=cmd_bailey)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code = args.func(args)
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
