"""Acceptance criteria 1-13, each at its stated tolerance.

Every test records a verdict through the ``record`` fixture; the summary at the
end of the run prints one PASS/FAIL line per criterion.
"""

import itertools
import subprocess
import sys
import time
from math import factorial
from pathlib import Path

from hcell import analysis, construct, permcore, reducts, structures
from hcell.expr import Finite, dp, rank_upper
from hcell.fixtures import (
    alternating4,
    c5,
    c8,
    cons_fixtures,
    directed_triangle,
    en_expr,
    eq2x2,
    marked_eq2x2,
    pure5,
    pure_set_expr,
)
from hcell.permcore import Perm, compose, from_cycles, inverse, sym, trivial
from hcell.verify import corrupt_omega_candidates, estar_row_ok, estar_sweep, merge_cases, verify_suite

FIXTURES = Path(__file__).parent / "fixtures"
CONS = cons_fixtures()


def fixture_cases():
    for name, (e, ts) in CONS.items():
        for t in ts:
            yield name, e, t


def test_criterion_01_oracle_equivalence(record):
    start = time.perf_counter()
    bad = []
    for name, e, t in fixture_cases():
        g, _ = construct.truncate(e, t)
        if construct.cons_oracle_elements(e, t) != set(g.elements()):
            bad.append(f"{name} t={t}")
    secs = time.perf_counter() - start
    small = all(len(construct.base_domain(e)) <= 4 for e, _ in CONS.values())
    ok = not bad and len(CONS) >= 5 and small and secs <= 60
    record(1, ok, f"{len(CONS)} fixtures, {len(list(fixture_cases()))} truncations, "
                  f"mismatches {bad}, {secs:.2f}s")


def test_criterion_02_index_identity(record):
    bad = []
    for name, e, t in fixture_cases():
        index = permcore.subgroup_relation(construct.cons_normal_core(e), e.h)["index"]
        g, _ = construct.truncate(e, t)
        gn, _ = construct.truncate(construct.normal_only(e), t)
        if index is None or g.order() != gn.order() * index:
            bad.append(f"{name} t={t}")
    record(2, not bad, f"mismatches {bad}")


def test_criterion_03_rho_calculus(record):
    checked, bad = 0, []
    for name, e, t in fixture_cases():
        g, meta = construct.truncate(e, t)
        elems = sorted(g.elements())
        dec = {s: construct.decompose(s, meta) for s in elems}
        vectors = list(meta.vectors())
        for s in elems:
            di = dec[Perm(inverse(s))]
            for u in elems:
                dprod = dec[Perm(compose(u, s))]
                for v in vectors:
                    res = construct.check_rho_identities(dec[s], dec[u], dprod, di, v)
                    checked += 1
                    if not (res["product"] and res["inverse"]):
                        bad.append(f"{name} t={t}")
                        break
    # negative control: a corrupted product table must be rejected
    g, meta = construct.truncate(CONS["swap2"][0], 2)
    s = next(x for x in sorted(g.elements()) if not x.is_identity())
    corrupt = construct.decompose(compose(s, s), meta)
    v = next(iter(corrupt.rho))
    corrupt.rho[v] = Perm(reversed(corrupt.rho[v]))
    neg = construct.check_rho_identities(construct.decompose(s, meta), construct.decompose(s, meta),
                                         corrupt, construct.decompose(inverse(s), meta), v)
    ok = not bad and neg["product"] is False
    record(3, ok, f"{checked} (pair, vector) cases, failures {bad[:3]}, "
                  f"corrupted table rejected={neg['product'] is False}")


def test_criterion_04_base_recovery(record):
    bad = []
    for name, e, t in fixture_cases():
        g, meta = construct.truncate(e, t)
        if construct.recover_base(g, meta).elements() != e.h.elements():
            bad.append(f"{name} t={t}")
    record(4, not bad, f"mismatches {bad}")


def test_criterion_05_orbit_profiles(record):
    start = time.perf_counter()
    pure = analysis.stable_profile(pure_set_expr(), 5, strict=True)
    e2 = analysis.stable_profile(en_expr(2), 5, strict=True)
    secs = time.perf_counter() - start
    values = (pure.o == [1, 2, 5, 15, 52] and pure.os == [1] * 5 and e2.os == [1, 2, 3, 5, 7])
    chain = all(p.os[n - 1] <= p.oi[n - 1] <= p.o[n - 1] <= factorial(n) * p.os[n - 1]
                for p in (pure, e2) for n in range(1, 6))
    stable = not pure.unstable and not e2.unstable
    record(5, values and chain and stable and secs <= 120,
           f"pure o={pure.o} os={pure.os}; e2 os={e2.os}; chain={chain}; {secs:.1f}s")


def test_criterion_06_structure_group_mirrors(record):
    bad = []
    fx = [eq2x2(), directed_triangle(), structures.graph("abc", [("a", "b"), ("b", "c")])]
    for a, b in itertools.combinations_with_replacement(fx, 2):
        u = structures.aut_group(structures.disjoint_union([a, b]))
        p = permcore.direct_product([structures.aut_group(a), structures.aut_group(b)])
        if u.domain != p.domain or u.elements() != p.elements():
            bad.append("union")
    for a in fx:
        for m in (1, 2, 3):
            c = structures.aut_group(structures.copies_trunc(a, m, rel_name="S"))
            w = permcore.wreath_finite(structures.aut_group(a), m)
            if c.domain != w.domain or c.elements() != w.elements():
                bad.append(f"copies m={m}")
    for n in (0, 1, 2):
        for t in (1, 2, 3):
            a = structures.aut_group(structures.en_family(n, t))
            g, _ = construct.truncate(en_expr(n), t)
            if a.domain != g.domain or a.elements() != g.elements():
                bad.append(f"en n={n} t={t}")
    record(6, not bad, f"mismatches {bad}")


def test_criterion_07_rank(record):
    ranks = [rank_upper(en_expr(n)) for n in range(5)]
    record(7, ranks == [0, 1, 2, 3, 4], f"ranks {ranks}")


def test_criterion_08_omega_partition(record):
    verdicts = {}
    for name, e, t in [("pure", pure_set_expr(), 3), ("e2", en_expr(2), 3),
                       ("c3_in_s3", CONS["c3_in_s3"][0], 2)]:
        g, meta = construct.truncate(e, t)
        verdicts[name] = analysis.omega_partition_check(g, meta, meta.omega_candidate())["passes"]
    r4, r5 = corrupt_omega_candidates()
    fail4 = r4["4"] is False and not r4["passes"]
    fail5 = r5["5"] is False and not r5["passes"]
    record(8, all(verdicts.values()) and fail4 and fail5,
           f"canonical {verdicts}; corruption fails (4)={fail4}, (5)={fail5}")


def test_criterion_09_width_suite(record):
    w3 = analysis.width(pure_set_expr(), 3).width
    w4 = analysis.width(pure_set_expr(), 4).width
    fixtures4 = [from_cycles("abcd", [[("a", "b")]]), from_cycles("abcd", [[("a", "b", "c", "d")]])]
    product_ok, reduct_ok, lattice_sizes = True, True, []
    for g in fixtures4:
        lat = reducts.intermediate_groups(g)
        lattice_sizes.append(lat.count)
        rep = reducts.width_monotonicity_report(g)
        reduct_ok &= not rep["width_violations"]
        widths = {id(h): analysis.width(Finite(h), 2).width for h in lat.groups}
        for h in lat.groups:
            for k in reducts.intermediate_groups(trivial("ab")).groups:
                lhs = analysis.width(dp(Finite(h), Finite(k)), 2).width
                product_ok &= lhs <= widths[id(h)] + analysis.width(Finite(k), 2).width
    for a, b in [(pure_set_expr(), pure_set_expr()), (pure_set_expr(), Finite(sym("ab"))),
                 (CONS["swap2"][0], Finite(trivial("x")))]:
        product_ok &= analysis.width(dp(a, b), 2).width <= analysis.width(a, 2).width + analysis.width(b, 2).width
    rows = estar_sweep(CONS)
    lift_ok = all(estar_row_ok(r) for r in rows)
    ok = w3 == 2 and w4 == 2 and product_ok and reduct_ok and lift_ok
    record(9, ok, f"pure width t=3:{w3} t=4:{w4}; lattices {lattice_sizes}; product={product_ok}; "
                  f"reduct={reduct_ok}; {len(rows)} lifts ok={lift_ok}")


def test_criterion_10_homogenizability(record):
    eq = structures.homog_check(eq2x2(), 2, 4)
    c8_rep = structures.homog_check(c8(), 2, 3)
    c8_fails = not c8_rep.passes and c8_rep.counterexample is not None and c8_rep.counterexample["n"] == 3
    delta_ok = True
    for a in [eq2x2(), directed_triangle(), c5(), c8(), alternating4(), marked_eq2x2()]:
        for m in (a.max_arity(), a.max_arity() + 1):
            d = structures.delta_m(a, m)
            delta_ok &= structures.aut_group(d).elements() == structures.aut_group(a).elements()
    record(10, eq.passes and c8_fails and delta_ok,
           f"equivalence passes={eq.passes}; C8 fails at (2,3)={c8_fails} "
           f"(counterexample {c8_rep.counterexample}); delta round trip={delta_ok}")


def test_criterion_11_boundedness(record):
    rep = structures.boundedness_scan(pure5(), 6)
    sizes = [o.size for o in rep.obstructions]
    scan_ok = sizes == [6] and rep.bound == 6
    forb_ok = True
    for a, s in [(pure5(), 6), (c5(), 4), (eq2x2(), 5)]:
        obs = structures.boundedness_scan(a, s).obstructions
        forb_ok &= structures.forb_check(a, obs, s)["agrees"]
    a, b, cs = merge_cases()
    bound = structures.boundedness_scan(a, a.size + 1).bound
    merge_ok = all(structures.merge_expansions_check(b, a, c, list(c.domain[:bound + 1]))["agrees"]
                   for c in cs)
    record(11, scan_ok and forb_ok and merge_ok,
           f"obstruction sizes {sizes}, b={rep.bound}; forb round trip={forb_ok}; "
           f"merge agrees on {len(cs)} structures={merge_ok}")


def test_criterion_12_reduct_lattice(record):
    a = reducts.intermediate_groups(trivial("abc"))
    b = reducts.intermediate_groups(from_cycles("abc", [[("a", "b", "c")]]))
    runs = [reducts.intermediate_groups(trivial("abc"), workers=w).to_json() for w in (1, 1, 2, 4)]
    det = all(r == runs[0] for r in runs)
    record(12, a.count == 6 and b.count == 2 and det,
           f"trivial on 3 points: {a.count}; 3-cycle: {b.count}; deterministic={det}")


def test_criterion_13_verify_suite(record):
    start = time.perf_counter()
    results = verify_suite()
    secs = time.perf_counter() - start
    failed = [r.name for r in results if not r.ok]
    codes = {}
    for name in ("neg_not_normal.sexp", "neg_moves_fixed.sexp"):
        proc = subprocess.run([sys.executable, "-m", "hcell.cli", "verify", "--fixture", str(FIXTURES / name)],
                              capture_output=True, text=True)
        codes[name] = proc.returncode
    ok = not failed and secs <= 300 and all(c != 0 for c in codes.values())
    record(13, ok, f"{len(results)} checks, failed {failed}, {secs:.1f}s; negative control exit codes {codes}")
