"""Named invariant checks over the built-in fixtures.

Each check returns ``(ok, detail)``.  ``verify_suite`` runs the checks whose
name contains the filter string and times each one; an exception counts as a
failure.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from math import factorial

from . import analysis, construct, fixtures, permcore, reducts, structures
from .dsl import parse, print_expr
from .expr import Finite, dp, rank_upper, validate, wr
from .permcore import Perm, compose, from_cycles, sym, trivial

CHECKS: dict = {}


def check(name):
    def deco(fn):
        CHECKS[name] = fn
        return fn
    return deco


@dataclass
class CheckResult:
    name: str
    ok: bool
    seconds: float
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "seconds": round(self.seconds, 3),
                "detail": self.detail}


class Context:
    def __init__(self, extra_cons=()):
        self.cons = dict(fixtures.cons_fixtures())
        for i, e in enumerate(extra_cons):
            self.cons[f"extra{i}"] = (e, (2,))


def _small_groups():
    return [trivial("abc"), sym("abc"), from_cycles("abc", [[("a", "b", "c")]]),
            from_cycles("abcd", [[("a", "b")], [("c", "d")]]),
            from_cycles("abcd", [[("a", "b"), ("c", "d")]]), sym("abcd")]


# ---------------------------------------------------------------- permcore


@check("permcore.closure")
def _closure(ctx):
    for g in _small_groups():
        el = g.elements()
        if g.identity() not in el or any(Perm(compose(s, x)) not in el for s in g.gens for x in el):
            return False, f"not closed: {g}"
    try:
        permcore.generate_elements(from_cycles("ab", [[("a", "b")]]), 1)
        return False, "cap not enforced"
    except permcore.CapExceeded:
        pass
    return True, "closure and cap"


@check("permcore.wreath_order")
def _wreath(ctx):
    for g in _small_groups()[:4]:
        for m in (1, 2, 3):
            if permcore.wreath_finite(g, m).order() != g.order() ** m * factorial(m):
                return False, f"{g} m={m}"
    return True, "order formula"


@check("permcore.restrict_inclusion")
def _restrict(ctx):
    for g in _small_groups():
        for r in range(1, g.degree):
            for ys in itertools.combinations(g.domain, r):
                a = permcore.restrict_inner(g, ys, "((Y))").elements()
                b = permcore.restrict_inner(g, ys, "(Y)").elements()
                if not a <= b:
                    return False, f"{ys}"
    return True, "pointwise inside setwise"


@check("permcore.quotient_hom")
def _quotient(ctx):
    g = permcore.wreath_finite(sym("ab"), 2)
    blocks = [[g.domain[0], g.domain[1]], [g.domain[2], g.domain[3]]]
    q = permcore.quotient_by_congruence(g, blocks)
    cls = {0: 0, 1: 0, 2: 1, 3: 1}
    act = lambda p: Perm(cls[p[2 * c]] for c in range(2))  # noqa: E731
    for x in g.elements():
        for y in g.elements():
            if act(Perm(compose(x, y))) != Perm(compose(act(x), act(y))):
                return False, "not multiplicative"
    if {act(x) for x in g.elements()} != set(q.elements()):
        return False, "image differs"
    return True, f"quotient order {q.order()}"


@check("permcore.orbit_monotonicity")
def _orbit_mono(ctx):
    for g in _small_groups():
        for h in reducts.intermediate_groups(g).groups:
            coarse = {x: i for i, o in enumerate(h.orbits()) for x in o}
            if any(len({coarse[x] for x in o}) != 1 for o in g.orbits()):
                return False, "an orbit of the subgroup is split"
    return True, "supergroups have coarser orbits"


# ---------------------------------------------------------------- expr


@check("expr.validate_fixtures")
def _validate(ctx):
    bad = {n: validate(e) for n, (e, _) in ctx.cons.items() if validate(e)}
    bad_cons = construct.normal_only(fixtures.cons_fixtures()["c3_in_s3"][0])
    broken = type(bad_cons)(bad_cons.y0, (from_cycles("abc", [[("a", "b")]]),),
                            from_cycles("abcz", [[("a", "c")]]))
    if not validate(broken):
        return False, "corrupt expression accepted"
    return (not bad), (f"violations: {bad}" if bad else f"{len(ctx.cons)} fixtures valid")


@check("expr.rank_wreath")
def _rank_wr(ctx):
    for n in range(5):
        if rank_upper(fixtures.en_expr(n)) != n:
            return False, f"n={n}"
    return True, "rank of nested wreaths"


@check("expr.rank_dp")
def _rank_dp(ctx):
    a, b = fixtures.en_expr(1), fixtures.en_expr(3)
    ok = rank_upper(dp(a, b)) == 3 and rank_upper(wr(dp(a, b))) == 4
    return ok, "rank of products"


@check("expr.dsl_roundtrip")
def _dsl(ctx):
    exprs = [e for e, _ in ctx.cons.values()] + [fixtures.en_expr(2), dp(fixtures.en_expr(1), Finite(sym("ab")))]
    for e in exprs:
        text = print_expr(e)
        if print_expr(parse(text)) != text:
            return False, text
    return True, f"{len(exprs)} expressions"


# ---------------------------------------------------------------- construct


def _sample(elems, k, seed=0):
    elems = sorted(elems)
    if len(elems) <= k:
        return elems
    return random.Random(seed).sample(elems, k)


@check("construct.oracle_equivalence")
def _oracle(ctx):
    for name, (e, ts) in ctx.cons.items():
        for t in ts:
            g, _ = construct.truncate(e, t)
            if construct.cons_oracle_elements(e, t) != set(g.elements()):
                return False, f"{name} t={t}"
    return True, "generated group equals membership set"


@check("construct.index_identity")
def _index(ctx):
    for name, (e, ts) in ctx.cons.items():
        n = permcore.subgroup_relation(construct.cons_normal_core(e), e.h)["index"]
        if n is None:
            return False, f"{name}: normal part is not a subgroup of h"
        for t in ts:
            g, _ = construct.truncate(e, t)
            gn, _ = construct.truncate(construct.normal_only(e), t)
            if g.order() != gn.order() * n:
                return False, f"{name} t={t}"
    return True, "index over normal part matches base index"


@check("construct.recover_base")
def _recover(ctx):
    for name, (e, ts) in ctx.cons.items():
        for t in ts:
            g, m = construct.truncate(e, t)
            if construct.recover_base(g, m).elements() != e.h.elements():
                return False, f"{name} t={t}"
            ne = construct.normal_only(e)
            g, m = construct.truncate(ne, t)
            if construct.recover_base(g, m).elements() != ne.h.elements():
                return False, f"{name} normal part t={t}"
    return True, "base group recovered"


@check("construct.decompose_roundtrip")
def _roundtrip(ctx):
    for name, (e, ts) in ctx.cons.items():
        g, m = construct.truncate(e, ts[-1])
        for s in _sample(g.elements(), 200):
            if construct.reassemble(construct.decompose(s, m), m) != s:
                return False, name
    return True, "reassembly inverts decomposition"


@check("construct.rho_product")
def _rho(ctx):
    count = 0
    for name, (e, ts) in ctx.cons.items():
        g, m = construct.truncate(e, ts[-1])
        elems = _sample(g.elements(), 20, seed=1)
        for s, u in itertools.product(elems, repeat=2):
            ds, du = construct.decompose(s, m), construct.decompose(u, m)
            dp_ = construct.decompose(compose(u, s), m)
            di = construct.decompose(permcore.inverse(s), m)
            for v in m.vectors():
                res = construct.check_rho_identities(ds, du, dp_, di, v)
                if not (res["product"] and res["inverse"]):
                    return False, f"{name} vector {v}"
                count += 1
    # negative control: a corrupted table must be caught
    e, _ = ctx.cons["swap2"]
    g, m = construct.truncate(e, 2)
    s = sorted(g.elements())[1]
    ds = construct.decompose(s, m)
    bad = construct.decompose(compose(s, s), m)
    v = next(iter(bad.rho))
    bad.rho[v] = Perm(reversed(bad.rho[v]))
    res = construct.check_rho_identities(ds, ds, bad, construct.decompose(permcore.inverse(s), m), v)
    if res["product"]:
        return False, "corrupted table passed"
    return True, f"{count} identities, corruption detected"


# ---------------------------------------------------------------- analysis


def _stable_profiles():
    return {"pure": analysis.stable_profile(fixtures.pure_set_expr(), 5),
            "e2": analysis.stable_profile(fixtures.en_expr(2), 5)}


@check("analysis.stable_profiles")
def _profiles(ctx):
    p = _stable_profiles()
    ok = (p["pure"].o == [1, 2, 5, 15, 52] and p["pure"].os == [1] * 5
          and p["e2"].os == [1, 2, 3, 5, 7])
    return ok, f"pure o={p['pure'].o}, e2 os={p['e2'].os}"


@check("analysis.orbit_chain")
def _chain(ctx):
    profs = [analysis.stable_profile(fixtures.pure_set_expr(), 4),
             analysis.stable_profile(fixtures.en_expr(2), 4)]
    for name, (e, _) in ctx.cons.items():
        profs.append(analysis.stable_profile(e, 2))
    for p in profs:
        for n in range(1, len(p.o) + 1):
            a, b, c = p.os[n - 1], p.oi[n - 1], p.o[n - 1]
            if not (a <= b <= c <= factorial(n) * a):
                return False, f"{p}"
    return True, f"{len(profs)} profiles"


@check("analysis.fewer_orbits")
def _fewer(ctx):
    for g in _small_groups():
        lat = reducts.intermediate_groups(g)
        profs = [analysis.orbit_profile(h, 3) for h in lat.groups]
        for a, b in lat.edges:
            pa, pb = profs[a], profs[b]
            if any(x < y for x, y in zip(pa.o + pa.oi + pa.os, pb.o + pb.oi + pb.os)):
                return False, f"edge {a}->{b}"
    return True, "supergroups have fewer orbits"


@check("analysis.profile_oracle")
def _profile_oracle(ctx):
    groups = _small_groups() + [construct.truncate(e, 2)[0] for e, _ in list(ctx.cons.values())[:4]]
    for g in groups:
        if analysis.orbit_profile(g, 3) != analysis.brute_orbit_profile(g, 3):
            return False, f"{g}"
    return True, f"{len(groups)} groups"


@check("analysis.congruence_lattice")
def _cong(ctx):
    counts = [len(analysis.congruences(sym("abc"))),
              len(analysis.congruences(permcore.wreath_finite(sym("ab"), 2))),
              len(analysis.congruences(trivial("ab")))]
    if counts != [2, 3, 2]:
        return False, f"{counts}"
    for g in _small_groups():
        cong = set(analysis.congruences(g))
        for p in cong:
            if not analysis._invariant(g.gens, p, g.degree):
                return False, "non-invariant partition"
        for p in cong:
            for q in cong:
                if analysis.join(p, q, g.degree) not in cong:
                    return False, "not join-closed"
    return True, f"counts {counts}"


def corrupt_omega_candidates():
    """Two bad triples: one breaks the copy count, one the full symmetric action."""
    g, m = construct.truncate(fixtures.en_expr(2), 3)
    k, nab, _ = m.omega_candidate()
    r4 = analysis.omega_partition_check(g, m, (k, nab, tuple((x,) for x in range(g.degree))))
    g5, m5 = construct.truncate(wr(Finite(trivial("ab"))), 3)
    a_pts = tuple(i for i, x in enumerate(g5.domain) if str(x[-1]) == "a")
    b_pts = tuple(i for i, x in enumerate(g5.domain) if str(x[-1]) == "b")
    r5 = analysis.omega_partition_check(g5, m5, ((), (a_pts, b_pts), tuple((x,) for x in range(6))))
    return r4, r5


@check("analysis.omega_partition")
def _omega(ctx):
    for e, t in [(fixtures.pure_set_expr(), 3), (fixtures.en_expr(2), 3),
                 (fixtures.cons_fixtures()["c3_in_s3"][0], 2)]:
        g, m = construct.truncate(e, t)
        if not analysis.omega_partition_check(g, m, m.omega_candidate())["passes"]:
            return False, "canonical triple rejected"
    r4, r5 = corrupt_omega_candidates()
    if r4["passes"] or r5["passes"]:
        return False, "corrupt candidates accepted"
    if not (r4["2"] and r4["4"] is False and r5["4"] and r5["5"] is False):
        return False, "corrupt candidates failed for the wrong reason"
    return True, "canonical triples pass; corruptions fail conditions 4 and 5"


@check("analysis.width_values")
def _width(ctx):
    w3 = analysis.width(fixtures.pure_set_expr(), 3).width
    w4 = analysis.width(fixtures.pure_set_expr(), 4).width
    wf = analysis.width(Finite(sym("abc")), 3).width
    return (w3, w4, wf) == (2, 2, 3), f"pure {w3},{w4}; finite {wf}"


def _width_pairs():
    return [(fixtures.pure_set_expr(), fixtures.pure_set_expr()),
            (fixtures.pure_set_expr(), Finite(sym("ab"))),
            (Finite(trivial("ab")), Finite(sym("abc"))),
            (fixtures.cons_fixtures()["swap2"][0], Finite(trivial("x")))]


@check("analysis.width_product")
def _wprod(ctx):
    for a, b in _width_pairs():
        t = 2
        lhs = analysis.width(dp(a, b), t).width
        rhs = analysis.width(a, t).width + analysis.width(b, t).width
        if lhs > rhs:
            return False, f"{lhs} > {rhs}"
    for g in [trivial("ab"), from_cycles("abcd", [[("a", "b")]])]:
        for h in reducts.intermediate_groups(g).groups:
            for k in reducts.intermediate_groups(trivial("ab")).groups:
                lhs = analysis.width(dp(Finite(h), Finite(k)), 2).width
                if lhs > analysis.width(Finite(h), 2).width + analysis.width(Finite(k), 2).width:
                    return False, "lattice product"
    return True, "width of products bounded by sums"


@check("analysis.width_reduct")
def _wred(ctx):
    for g in [from_cycles("abcd", [[("a", "b")]]), from_cycles("abcd", [[("a", "b", "c", "d")]])]:
        rep = reducts.width_monotonicity_report(g)
        if rep["width_violations"]:
            return False, f"{rep['width_violations']}"
    return True, "width never grows along lattice edges"


def estar_sweep(cons: dict, t: int = 2) -> list:
    """Lift every base congruence of every point stabiliser in every block.

    Rows are ``(name, block, point, base_ok, lifted_ok, base_classes, acl, width)``;
    ``acl`` is None when the lifted site does not extend to ``t + 1``.
    """
    rows = []
    for name, (e, _) in cons.items():
        g, m = construct.truncate(e, t)
        w = analysis.width(e, t).width
        for i in range(1, m.k + 1):
            ys = m.blocks[i]
            inner = permcore.restrict_inner(e.h, ys, "(Y)")
            for x in ys:
                hx = permcore.stabilizer(inner, [x])
                for blocks in analysis.congruences(hx):
                    lab = [[hx.domain[j] for j in b] for b in blocks]
                    lift = analysis.lift_congruence_estar(e, m, g, i, x, lab)
                    site = ([lift["point"]], [[m.domain[p] for p in b] for b in lift["partition"]])
                    try:
                        acl = analysis.stable_acl(e, t, site).acl_size
                    except analysis.SiteMismatch:
                        acl = None
                    rows.append((name, i, permcore.label_str(x), lift["base_congruence"],
                                 lift["lifted_congruence"], lift["base_classes"], acl, w))
    return rows


def estar_row_ok(row) -> bool:
    _, _, _, base_ok, lifted_ok, classes, acl, w = row
    return base_ok and lifted_ok and acl is not None and classes <= acl <= w


@check("analysis.estar_lift")
def _estar(ctx):
    rows = estar_sweep(ctx.cons)
    bad = [r for r in rows if not estar_row_ok(r)]
    if bad:
        return False, f"{bad[0]}"
    return True, f"{len(rows)} lifts"


@check("analysis.hstar_closure")
def _hstar(ctx):
    for name, (e, ts) in ctx.cons.items():
        for t in ts:
            g, m = construct.truncate(e, t)
            gn, mn = construct.truncate(construct.normal_only(e), t)
            for s in e.h.gens:
                gn = construct.diagonal_extend(gn, mn, s)
            if gn.elements() != g.elements():
                return False, f"{name} t={t}"
    return True, "normal part plus diagonal copies gives the whole group"


# ---------------------------------------------------------------- structures


def _struct_fixtures():
    return [fixtures.eq2x2(), fixtures.directed_triangle(), fixtures.c5(),
            structures.graph("abc", [("a", "b"), ("b", "c")]), fixtures.marked_eq2x2()]


@check("structures.aut_union")
def _aut_union(ctx):
    fx = _struct_fixtures()
    for a, b in [(fx[0], fx[1]), (fx[1], fx[3]), (fx[3], fx[3])]:
        u = structures.aut_group(structures.disjoint_union([a, b]))
        p = permcore.direct_product([structures.aut_group(a), structures.aut_group(b)])
        if u.domain != p.domain or u.elements() != p.elements():
            return False, "union automorphisms differ from product"
    return True, "automorphisms of unions are products"


@check("structures.aut_copies")
def _aut_copies(ctx):
    for a in _struct_fixtures()[:4]:
        for m in (1, 2):
            c = structures.aut_group(structures.copies_trunc(a, m, rel_name="S"))
            w = permcore.wreath_finite(structures.aut_group(a), m)
            if c.domain != w.domain or c.elements() != w.elements():
                return False, f"m={m}"
    return True, "automorphisms of copies are wreaths"


@check("structures.aut_en_family")
def _aut_en(ctx):
    for n, t in [(0, 2), (1, 3), (2, 2), (2, 3)]:
        a = structures.aut_group(structures.en_family(n, t))
        g, _ = construct.truncate(fixtures.en_expr(n), t)
        if a.domain != g.domain or a.elements() != g.elements():
            return False, f"n={n} t={t}"
    return True, "nested equivalences mirror nested wreaths"


@check("structures.delta_m_homog")
def _delta(ctx):
    for a in _struct_fixtures()[:4] + [fixtures.alternating4()]:
        for m in (a.max_arity(), a.max_arity() + 1):
            d = structures.delta_m(a, m)
            if structures.aut_group(d).elements() != structures.aut_group(a).elements():
                return False, "orbit expansion changed automorphisms"
            if structures.homog_check(d, m, 3).passes != structures.homog_check(a, m, 3).passes:
                return False, "homogenisability differs"
    return True, "orbit expansions keep automorphisms"


def _index_pairs():
    """(A, B, index) with Aut(A) inside Aut(B) on the same domain."""
    return [(fixtures.marked_eq2x2(), fixtures.eq2x2(), 2),
            (fixtures.directed_triangle(), structures.pure_set("abc"), 2),
            (fixtures.alternating4(), structures.pure_set("abcd"), 2)]


@check("structures.finite_index_hom")
def _fin_index(ctx):
    for a, b, d in _index_pairs():
        ga, gb = structures.aut_group(a), structures.aut_group(b)
        if permcore.subgroup_relation(ga, gb)["index"] != d:
            return False, "index mismatch"
        for m in (2, 3):
            if structures.homog_check(a, m, 4).passes and not structures.homog_check(b, d * m, 4).passes:
                return False, f"m={m}"
    return True, "finite-index supergroups stay homogenisable"


@check("structures.fin_types")
def _fin_types(ctx):
    for a, b, d in _index_pairs():
        ga, gb = structures.aut_group(a), structures.aut_group(b)
        for n in (1, 2, 3):
            ia = analysis.tuple_orbit_ids(ga.gens, ga.degree, n)
            ib = analysis.tuple_orbit_ids(gb.gens, gb.degree, n)
            split: dict = {}
            for u, v in ib.items():
                split.setdefault(v, set()).add(ia[u])
            if max(len(s) for s in split.values()) > d:
                return False, f"n={n}"
    return True, "each orbit splits into at most index many"


@check("structures.homog_fixtures")
def _homog(ctx):
    ok = structures.homog_check(fixtures.eq2x2(), 2, 4).passes
    bad = structures.homog_check(fixtures.alternating4(), 2, 3)
    return ok and not bad.passes, f"equivalence passes; alternating counterexample {bad.counterexample}"


@check("structures.boundedness")
def _bounds(ctx):
    r = structures.boundedness_scan(fixtures.pure5(), 6)
    if [o.size for o in r.obstructions] != [6] or r.bound != 6:
        return False, "pure set"
    r = structures.boundedness_scan(fixtures.c5(), 3)
    tri = structures.graph("012", [("0", "1"), ("1", "2"), ("0", "2")])
    key = structures.canonical_form(tri)
    if key not in {structures.canonical_form(o) for o in r.obstructions}:
        return False, "triangle missing"
    return True, f"c5 bound {r.bound}"


@check("structures.forb_roundtrip")
def _forb(ctx):
    for a, s in [(fixtures.pure5(), 6), (fixtures.c5(), 4), (fixtures.eq2x2(), 5)]:
        obs = structures.boundedness_scan(a, s).obstructions
        if not structures.forb_check(a, obs, s)["agrees"]:
            return False, "obstructions do not define the age"
        if obs and structures.forb_check(a, obs[:-1], s)["agrees"]:
            return False, "dropping an obstruction went unnoticed"
    return True, "minimal obstructions define the age"


def merge_cases():
    a = fixtures.marked_eq2x2()
    b = a.reduct(["E"])
    cs = [fixtures.eq2x2(),
          structures.equivalence([["a", "b", "c"], ["d"]]),
          structures.equivalence([["a"], ["b"], ["c"], ["d"]]),
          structures.equivalence([["a", "b"], ["c"], ["d"]]),
          structures.equivalence([["a", "b"], ["c", "d", "e"]]),
          structures.equivalence([["a", "b", "c", "d"]])]
    return a, b, cs


@check("structures.merge")
def _merge(ctx):
    a, b, cs = merge_cases()
    bound = structures.boundedness_scan(a, a.size + 1).bound
    for c in cs:
        marked = list(c.domain[:bound + 1])
        r = structures.merge_expansions_check(b, a, c, marked)
        if not r["agrees"]:
            return False, f"{c.to_json()}"
    return True, f"{len(cs)} structures, bound {bound}"


# ---------------------------------------------------------------- reducts


@check("reducts.lattice_counts")
def _lat(ctx):
    counts = [reducts.intermediate_groups(trivial("abc")).count,
              reducts.intermediate_groups(from_cycles("abc", [[("a", "b", "c")]])).count,
              reducts.intermediate_groups(sym("abcd")).count,
              reducts.reduct_count(fixtures.directed_triangle())]
    return counts == [6, 2, 1, 2], f"{counts}"


@check("reducts.closed_generated")
def _gen(ctx):
    for g in _small_groups()[:4]:
        lat = reducts.intermediate_groups(g)
        for h, added in zip(lat.groups, lat.added):
            k = permcore.FinPermGroup.on_sorted(g.domain, list(g.gens) + list(added))
            if k.elements() != h.elements():
                return False, "group not generated by base and added elements"
    return True, "each group is base plus adjoined elements"


@check("reducts.order_insensitive")
def _order(ctx):
    g = trivial("abcd")
    a = reducts.intermediate_groups(g, workers=1).to_json()
    b = reducts.intermediate_groups(g, workers=4).to_json()
    return a == b, f"{a['count']} groups"


@check("reducts.truncation_counts")
def _trunc_counts(ctx):
    counts = {}
    for name, e, t in [("pure", fixtures.pure_set_expr(), 3), ("e2", fixtures.en_expr(2), 2),
                       ("swap2", fixtures.cons_fixtures()["swap2"][0], 2)]:
        g, _ = construct.truncate(e, t)
        counts[f"{name} t={t}"] = reducts.intermediate_groups(g).count
    # S3 is everything; the dihedral group of order 8 is maximal in S4; above the
    # normal Klein group sit three dihedral groups, A4 and S4
    ok = counts["pure t=3"] == 1 and counts["e2 t=2"] == 2 and counts["swap2 t=2"] == 6
    return ok, f"supergroup counts per truncation {counts}"


# ---------------------------------------------------------------- cli


@check("cli.deterministic")
def _cli(ctx):
    import contextlib
    import io
    import os
    import tempfile

    from .cli import main

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "e.sexp")
        with open(path, "w") as fh:
            fh.write(print_expr(fixtures.en_expr(2)))
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                code = main(["profile", "--expr", path, "--n", "3"])
            outs.append((code, buf.getvalue()))
    return outs[0] == outs[1] and outs[0][0] == 0, "identical output"


def verify_suite(pattern: str | None = None, extra_cons=()) -> list[CheckResult]:
    ctx = Context(extra_cons)
    out = []
    for name, fn in CHECKS.items():
        if pattern and pattern not in name:
            continue
        start = time.perf_counter()
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), time.perf_counter() - start, detail))
    return out
