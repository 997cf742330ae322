"""Command-line front end.

Exit status: 0 when the command succeeds and every reported check holds,
1 when a check, audit or trace request comes back negative, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import warnings
from pathlib import Path

from .algebra import (METAPROPERTIES, AlgebraError, FiniteAlgebra, canonical_property,
                      catalog, catalog_names, check_metaproperty, resolve_algebra)
from .norms import NormFile, NormRelation, TraceUnavailable, close, load_norms, out, parse_rules
from .permissions import (FamilyError, check_rule_closure, dual_negative, dual_negative_classical,
                          dynamic_positive, dynamic_positive_classical, generalized_dynamic,
                          load_family, negative_permission, negative_permission_classical,
                          static_positive)
from .syntax import ParseError, UnassignedAtom, UnboundConnective, evaluate, parse
from .verifier import (SUITE_ALGEBRAS, SUITES, InfeasibleStrategy, UnknownCheck, UnknownSuite,
                       reports_to_json, run_check, run_suite)

__all__ = ["main", "InputError"]

DEFAULT_MAX_CARRIER = 32


class InputError(Exception):
    """Bad arguments or files; reported on stderr with exit status 2."""


def _max_carrier() -> int:
    raw = os.environ.get("IOLOG_MAX_CARRIER", str(DEFAULT_MAX_CARRIER))
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"IOLOG_MAX_CARRIER must be an integer, got {raw!r}") from None


def _admit(alg: FiniteAlgebra) -> FiniteAlgebra:
    cap = _max_carrier()
    if alg.size > cap:
        raise InputError(f"{alg.name} has {alg.size} elements; IOLOG_MAX_CARRIER is {cap}")
    return alg


def _algebra(ref: str):
    m = re.fullmatch(r"\s*chain\((\d+)\)\s*", ref)
    if m and int(m.group(1)) > _max_carrier():
        raise InputError(f"{ref} exceeds IOLOG_MAX_CARRIER={_max_carrier()}")
    alg, b = resolve_algebra(ref)
    return _admit(alg), b


def _norms(path: str, like: NormFile | None = None) -> NormFile:
    if not Path(path).is_file():
        raise InputError(f"no such file: {path}")
    if like is None:
        nf = load_norms(path)
    else:
        nf = load_norms(path, like.alg, like.binding)
    _admit(nf.alg)
    ref = str(nf.raw.get("algebra", ""))
    try:
        catalog(ref)
    except AlgebraError:
        # pin file algebras to an absolute path so emitted relations reload
        nf.raw = {**nf.raw, "algebra": str((Path(path).parent / ref).resolve())}
    return nf


def _term(nf: NormFile, tok: str) -> int:
    """An element given by label, id, or formula under the file's assignment."""
    tok = tok.strip()
    try:
        return nf.alg.element(tok)
    except KeyError:
        pass
    assignment = {k: nf.alg.element(v) for k, v in dict(nf.raw.get("assignment", {})).items()}
    return evaluate(parse(tok), nf.alg, nf.binding, assignment)


def _pair(nf: NormFile, text: str) -> tuple[int, int]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")") and body.count(",") == 1:
        body = body[1:-1]
    parts = body.split(",")
    if len(parts) != 2:
        raise InputError(f"a pair is written 'a,x'; got {text!r}")
    return _term(nf, parts[0]), _term(nf, parts[1])


def _lab(alg: FiniteAlgebra, pair) -> str:
    return f"({alg.label(pair[0])},{alg.label(pair[1])})"


# ---------------------------------------------------------------------------
# output


def _relation_json(nf: NormFile, rel: NormRelation, role: str) -> dict:
    # atoms e0, e1, ... name the elements so the result loads as a norm file
    return {
        "algebra": str(nf.raw.get("algebra", rel.alg.name)),
        "role": role,
        "count": len(rel),
        "pairs": [[f"e{a}", f"e{x}"] for a, x in rel.pairs],
        "assignment": {f"e{x}": x for x in rel.alg.elements},
        "labels": rel.to_json(labels=True),
    }


def _emit_relation(args, nf: NormFile, rel: NormRelation, title: str, role: str = "norms"):
    if args.json:
        print(json.dumps(_relation_json(nf, rel, role)))
        return
    print(f"{title}: {len(rel)} pairs over {rel.alg.name}")
    for p in rel.pairs:
        print("  " + _lab(rel.alg, p))


def _emit_report(args, report, alg: FiniteAlgebra | None = None):
    if args.json:
        print(json.dumps(report.to_dict()))
        return
    line = f"{'holds' if report.holds else 'FAILS'}  {report.check_id}"
    if report.witness is not None:
        w = report.witness
        if alg is not None and all(isinstance(x, int) for x in w):
            w = tuple(alg.label(x) for x in w)
        line += f"  witness={w}"
    if report.notes:
        line += f"  [{report.notes}]"
    print(line)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_algebra(args) -> int:
    if args.action == "list":
        names = catalog_names()
        if args.json:
            print(json.dumps(names))
        else:
            for name in names:
                print(name)
        return 0
    if not args.name:
        raise InputError("algebra show needs a NAME")
    alg, b = _algebra(args.name)
    if args.json:
        print(json.dumps({**alg.to_json(), "binding": dict(b.symbols)}))
        return 0
    lab = alg.label
    print(f"{alg.name}: {alg.size} elements, bottom {lab(alg.bottom)}, top {lab(alg.top)}")
    print("elements: " + " ".join(lab(x) for x in alg.elements))
    covers = [f"{lab(a)}<{lab(c)}" for a in alg.elements for c in alg.elements
              if a != c and alg.le[a][c]
              and not any(z not in (a, c) and alg.le[a][z] and alg.le[z][c] for z in alg.elements)]
    print("covers: " + " ".join(covers))
    print("binding: " + ", ".join(f"{k}={v}" for k, v in sorted(b.symbols.items())))
    for name, table in sorted(alg.unary_ops.items()):
        print(f"{name}: " + " ".join(f"{lab(x)}->{lab(table[x])}" for x in alg.elements))
    for name in sorted(alg.binary_ops):
        print(f"{name}: (binary table, {alg.size}x{alg.size})")
    return 0


def _cmd_props(args) -> int:
    alg, b = _algebra(args.algebra)
    if args.props:
        props = [canonical_property(p.strip()) for p in args.props.split(",") if p.strip()]
    else:
        props = list(METAPROPERTIES)
    reports = [check_metaproperty(alg, b, p) for p in props]
    if args.json:
        print(json.dumps([r.to_dict() for r in reports]))
    else:
        for r in reports:
            _emit_report(args, r, alg)
    # the full table is informational; an explicit list asks for a verdict
    if args.props and not all(reports):
        return 1
    return 0


def _cmd_close(args) -> int:
    nf = _norms(args.norms)
    rules = parse_rules(args.rules)
    closed, trace = close(nf.relation, rules)
    if args.trace is None:
        _emit_relation(args, nf, closed, f"closure under {args.rules}")
        return 0
    pair = _pair(nf, args.trace)
    try:
        steps = trace.explain(pair)
    except TraceUnavailable:
        if args.json:
            print(json.dumps({"pair": list(pair), "derivable": False}))
        else:
            print(f"{_lab(nf.alg, pair)} is not derivable under {args.rules}")
        return 1
    if args.json:
        print(json.dumps({"pair": list(pair), "derivable": True,
                          "steps": [{"pair": list(p), "rule": r, "premises": [list(q) for q in prem]}
                                    for p, r, prem in steps]}))
        return 0
    for p, rule, prem in steps:
        src = ", ".join(_lab(nf.alg, q) for q in prem)
        print(f"{_lab(nf.alg, p):<12} {rule:<5} {src}")
    return 0


def _cmd_out(args) -> int:
    nf = _norms(args.norms)
    inputs = [_term(nf, t) for t in args.inputs.split(",") if t.strip()]
    result = sorted(out(nf.relation, parse_rules(args.rules), inputs))
    labels = [nf.alg.label(x) for x in result]
    if args.json:
        print(json.dumps({"inputs": inputs, "outputs": result, "labels": labels}))
    else:
        print("{" + ", ".join(labels) + "}")
    return 0


def _cmd_perm(args) -> int:
    nf = _norms(args.norms)
    n = nf.relation
    kind = args.kind
    if kind in ("neg", "dual"):
        if args.classical:
            f = negative_permission_classical if kind == "neg" else dual_negative_classical
            rel = f(n, binding=nf.binding)
        else:
            rel = negative_permission(n) if kind == "neg" else dual_negative(n)
        title = {"neg": "negative permission", "dual": "dual negative permission"}[kind]
        _emit_relation(args, nf, rel, title + (" (classical)" if args.classical else ""),
                       "permission")
        return 0
    if args.rules is None:
        raise InputError(f"perm {kind} needs --rules")
    if args.perms is None:
        raise InputError(f"perm {kind} needs a PERMS file")
    rules = parse_rules(args.rules)
    p = _norms(args.perms, like=nf).relation
    if kind == "static":
        rel = static_positive(p, n, rules)
        title = "static positive permission"
    elif kind == "dynamic":
        if args.classical:
            rel = dynamic_positive_classical(p, n, rules, binding=nf.binding)
        else:
            rel = dynamic_positive(p, n, rules)
        title = "dynamic positive permission" + (" (classical)" if args.classical else "")
    else:
        if args.family is None:
            raise InputError("perm gen needs a FAMILY file")
        if not Path(args.family).is_file():
            raise InputError(f"no such file: {args.family}")
        fam = load_family(args.family, nf.alg, nf.binding)
        rel = generalized_dynamic(p, n, rules, fam)
        title = "generalized dynamic permission"
    _emit_relation(args, nf, rel, title, "permission")
    return 0


def _cmd_audit(args) -> int:
    nf = _norms(args.relation)
    ctx = _norms(args.context, like=nf).relation if args.context else None
    report = check_rule_closure(nf.relation, args.variant, ctx, nf.binding)
    _emit_report(args, report, nf.alg)
    return 0 if report.holds else 1


def _cmd_verify(args) -> int:
    algebras = [a.strip() for a in args.algebras.split(",")] if args.algebras else None
    for name in algebras or SUITE_ALGEBRAS:
        _algebra(name)
    if args.check:
        reports = [run_check(c, a, seed=args.seed, count=args.count)
                   for c in args.check for a in (algebras or SUITE_ALGEBRAS)]
    else:
        reports = run_suite(args.suite, seed=args.seed, algebras=algebras, count=args.count)
    if args.json:
        print(json.dumps(reports_to_json(reports, timing=not args.no_timing)))
    else:
        for r in reports:
            mark = "ok  " if r.holds else "FAIL"
            line = f"{mark} {r.check_id:<12} {r.notes}  instances={r.instances}"
            if not args.no_timing:
                line += f"  {r.millis:.0f}ms"
            if r.witness is not None:
                line += f"  witness={r.witness}"
            print(line)
        bad = sum(not r.holds for r in reports)
        print(f"{len(reports) - bad}/{len(reports)} hold")
    return 0 if all(reports) else 1


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = argparse.ArgumentParser(prog="iolog", description="input/output logic over finite lattices")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", parents=[common], help="list or show catalog algebras")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=_cmd_algebra)

    p = sub.add_parser("props", parents=[common], help="metalogical property table")
    p.add_argument("algebra", help="catalog name or algebra file")
    p.add_argument("--props", help="comma-separated properties, e.g. neg_I,neg_A")
    p.set_defaults(func=_cmd_props)

    p = sub.add_parser("close", parents=[common], help="closure of a normative system")
    p.add_argument("norms")
    p.add_argument("--rules", required=True, help="preset N1..N4 or rule list like SI,WO,CT")
    p.add_argument("--trace", metavar="PAIR", help="explain one pair, e.g. 'p,q'")
    p.set_defaults(func=_cmd_close)

    p = sub.add_parser("out", parents=[common], help="output for a set of inputs")
    p.add_argument("norms")
    p.add_argument("--rules", required=True)
    p.add_argument("--inputs", required=True, help="comma-separated elements or formulas")
    p.set_defaults(func=_cmd_out)

    p = sub.add_parser("perm", parents=[common], help="permission systems")
    p.add_argument("kind", choices=["neg", "dual", "static", "dynamic", "gen"])
    p.add_argument("norms")
    p.add_argument("perms", nargs="?")
    p.add_argument("family", nargs="?")
    p.add_argument("--rules")
    p.add_argument("--classical", action="store_true", help="use the bound negation")
    p.set_defaults(func=_cmd_perm)

    p = sub.add_parser("audit", parents=[common], help="closure audit of a relation")
    p.add_argument("relation")
    p.add_argument("--variant", required=True, help="e.g. SI>, AND<, CT_down")
    p.add_argument("--context", help="normative system the rule refers to")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--suite", default="all", choices=sorted(SUITES))
    p.add_argument("--check", action="append", help="run one check id (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10000, help="draws per sampled check")
    p.add_argument("--algebras", help=f"comma-separated; default {','.join(SUITE_ALGEBRAS)}")
    p.add_argument("--no-timing", action="store_true", help="omit timings (byte-stable output)")
    p.set_defaults(func=_cmd_verify)
    return ap


_INPUT_ERRORS = (InputError, OSError, json.JSONDecodeError, AlgebraError, ParseError,
                 UnboundConnective, UnassignedAtom, FamilyError, InfeasibleStrategy,
                 UnknownCheck, UnknownSuite, KeyError, ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except _INPUT_ERRORS as e:
        msg = str(e.args[0]) if type(e) is KeyError and e.args else str(e)
        print(f"iolog: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
