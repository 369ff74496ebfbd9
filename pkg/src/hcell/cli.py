"""Command line front end.

Exit codes: 0 success, 1 counterexample or failed check, 2 error (a JSON
error object is printed).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, construct, reducts, structures
from .dsl import ParseError, parse
from .expr import Cons, rank_upper, validate
from .permcore import DEFAULT_ELEM_CAP, FinPermGroup, Perm, label_str, parse_label


class UsageError(ValueError):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _expr(args):
    if not args.expr:
        raise UsageError("--expr is required")
    return parse(_read(args.expr))


def _group(args):
    if args.group:
        return FinPermGroup.from_json(_read(args.group), elem_cap=args.elem_cap)
    if args.expr:
        g, _ = construct.truncate(_expr(args), args.t)
        return g
    raise UsageError("--group or --expr is required")


def _struct(path):
    if not path:
        raise UsageError("--struct is required")
    return structures.RelStruct.from_json(_read(path))


def _table(obj) -> str:
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        return "\n".join(f"{str(k):<{width}}  {json.dumps(v, separators=(',', ':'))}"
                         for k, v in obj.items()) + "\n"
    if isinstance(obj, list):
        return "".join(_table(x) if isinstance(x, dict) else json.dumps(x) + "\n" for x in obj)
    return f"{obj}\n"


def _emit(obj, fmt: str, dot: str | None = None):
    if fmt == "dot":
        if dot is None:
            raise UsageError("dot output is only available for lattices")
        sys.stdout.write(dot)
    elif fmt == "table":
        sys.stdout.write(_table(obj))
    else:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------- commands


def cmd_profile(args):
    if args.group:
        rep = analysis.orbit_profile(_group(args), args.n).to_json()
    else:
        rep = analysis.stable_profile(_expr(args), args.n, strict=False).to_json()
    _emit(rep, args.format)
    return 0


def cmd_rank(args):
    e = _expr(args)
    bad = validate(e)
    _emit({"rank_upper": rank_upper(e), "violations": bad}, args.format)
    return 1 if bad else 0


def cmd_width(args):
    _emit(analysis.width(_expr(args), args.t).to_json(), args.format)
    return 0


def cmd_congruences(args):
    g = _group(args)
    _emit({"congruences": [analysis.partition_labels(g, p) for p in analysis.congruences(g)]}, args.format)
    return 0


def cmd_omega(args):
    e = _expr(args)
    g, meta = construct.truncate(e, args.t)
    canon = analysis.omega_partition_check(g, meta, meta.omega_candidate())
    found = analysis.omega_partition_find(g, args.t)
    _emit({"canonical": {**analysis.candidate_labels(g, meta.omega_candidate()), "verdict": canon},
           "passing": [analysis.candidate_labels(g, c) for c in found]}, args.format)
    return 0 if canon["passes"] else 1


def cmd_truncate(args):
    g, meta = construct.truncate(_expr(args), args.t)
    _emit({"group": g.to_json(), "meta": meta.to_json()}, args.format)
    return 0


def _perm(g: FinPermGroup, text: str) -> Perm:
    data = json.loads(text)
    if isinstance(data, dict):
        return g.perm_from_map({parse_label(a): parse_label(b) for a, b in data.items()})
    return Perm(data)


def cmd_membership(args):
    e = _expr(args)
    if not isinstance(e, Cons):
        raise UsageError("membership needs a cons expression")
    g, meta = construct.truncate(e, args.t)
    sigma = _perm(g, args.perm if args.perm.lstrip().startswith(("[", "{")) else _read(args.perm))
    v = construct.membership_abcd(sigma, e, meta)
    _emit(v.to_json(), args.format)
    return 0 if v.member else 1


def cmd_recover(args):
    g, meta = construct.truncate(_expr(args), args.t)
    _emit(construct.recover_base(g, meta).to_json(), args.format)
    return 0


def cmd_homog(args):
    rep = structures.homog_check(_struct(args.struct), args.m, args.n)
    _emit(rep.to_json(), args.format)
    return 0 if rep.passes else 1


def cmd_delta(args):
    _emit(structures.delta_m(_struct(args.struct), args.m).to_json(), args.format)
    return 0


def cmd_bounds(args):
    _emit(structures.boundedness_scan(_struct(args.struct), args.s).to_json(), args.format)
    return 0


def cmd_forb(args):
    a = _struct(args.struct)
    forb = [structures.RelStruct.from_json(x) for x in json.loads(_read(args.forb))]
    rep = structures.forb_check(a, forb, args.s)
    _emit(rep, args.format)
    return 0 if rep["agrees"] else 1


def cmd_merge(args):
    a = _struct(args.struct)
    b = a.reduct(args.reduct.split(","))
    c = _struct(args.c)
    rep = structures.merge_expansions_check(b, a, c, args.marked.split(","))
    _emit(rep, args.format)
    return 0 if rep["agrees"] else 1


def cmd_lattice(args):
    lat = reducts.intermediate_groups(_group(args), workers=args.workers)
    _emit(lat.to_json(), args.format, lat.to_dot())
    return 0


def cmd_reducts(args):
    a = _struct(args.struct)
    lat = reducts.intermediate_groups(structures.aut_group(a), workers=args.workers)
    _emit({"count": lat.count, "lattice": lat.to_json()}, args.format, lat.to_dot())
    return 0


def cmd_verify(args):
    from .verify import verify_suite

    extra = [parse(_read(p)) for p in args.fixture]
    results = verify_suite(args.filter, extra)
    passed = sum(r.ok for r in results)
    if args.format == "table":
        width = max((len(r.name) for r in results), default=0)
        for r in results:
            sys.stdout.write(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}\n")
        sys.stdout.write(f"passed {passed} / failed {len(results) - passed}\n")
    else:
        _emit({"passed": passed, "failed": len(results) - passed,
               "checks": [r.to_json() for r in results]}, args.format)
    return 0 if all(r.ok for r in results) else 1


COMMANDS = {
    "profile": (cmd_profile, "orbit counts on tuples and subsets"),
    "rank": (cmd_rank, "rank bound and validation"),
    "width": (cmd_width, "stable closure width of a truncation"),
    "congruences": (cmd_congruences, "invariant partitions of a group"),
    "omega-partition": (cmd_omega, "check and search fixed/coarse/fine triples"),
    "truncate": (cmd_truncate, "finite truncation of an expression"),
    "membership": (cmd_membership, "membership conditions for a permutation"),
    "recover": (cmd_recover, "recover the base group of a truncation"),
    "homog": (cmd_homog, "homogenisability by m-ary relations"),
    "delta-m": (cmd_delta, "orbit expansion by m-ary relations"),
    "bounds": (cmd_bounds, "minimal structures outside the age"),
    "forb": (cmd_forb, "compare age with a forbidden-structure class"),
    "merge": (cmd_merge, "merge expansions versus direct age membership"),
    "lattice": (cmd_lattice, "closed supergroups of a group"),
    "reducts": (cmd_reducts, "closed supergroups of an automorphism group"),
    "verify": (cmd_verify, "run the named invariant checks"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hcell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--expr", help="expression file (s-expression)")
        s.add_argument("--group", help="group file (JSON)")
        s.add_argument("--struct", help="structure file (JSON)")
        s.add_argument("--t", type=int, default=3, help="truncation size")
        s.add_argument("--n", type=int, default=4, help="largest tuple length")
        s.add_argument("--m", type=int, default=2, help="relation arity")
        s.add_argument("--s", type=int, default=4, help="structure size horizon")
        s.add_argument("--elem-cap", type=int, default=DEFAULT_ELEM_CAP)
        s.add_argument("--format", choices=["json", "table", "dot"], default="json")
        s.add_argument("--workers", type=int, default=1)
        if name == "membership":
            s.add_argument("--perm", required=True, help="image list or label map (JSON or file)")
        if name == "forb":
            s.add_argument("--forb", required=True, help="JSON list of structures")
        if name == "merge":
            s.add_argument("--reduct", required=True, help="comma separated relation names kept")
            s.add_argument("--c", required=True, help="structure to test")
            s.add_argument("--marked", required=True, help="comma separated labels")
        if name == "verify":
            s.add_argument("--filter", default=None, help="run checks whose name contains this")
            s.add_argument("--fixture", action="append", default=[], help="extra cons expression file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command][0](args)
    except ParseError as exc:
        err = {"error": "ParseError", "message": str(exc), "line": exc.line,
               "column": exc.col, "expected": exc.expected}
    except Exception as exc:  # report every failure as a JSON error object
        err = {"error": type(exc).__name__, "message": str(exc)}
    sys.stdout.write(json.dumps(err) + "\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
