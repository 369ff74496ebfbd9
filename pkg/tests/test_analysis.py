from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcell import analysis, construct
from hcell.expr import Finite, dp
from hcell.fixtures import cons_fixtures, en_expr, pure_set_expr
from hcell.permcore import FinPermGroup, Perm, from_cycles, sym, trivial, wreath_finite

perms4 = st.permutations(range(4)).map(Perm)


def test_stirling_numbers():
    assert [analysis.stirling2(4, k) for k in range(5)] == [0, 1, 7, 6, 1]
    assert sum(analysis.stirling2(5, k) for k in range(6)) == 52


@settings(max_examples=40, deadline=None)
@given(st.lists(perms4, max_size=3))
def test_fast_profile_matches_brute_force(gens):
    g = FinPermGroup.on_sorted("abcd", gens)
    assert analysis.orbit_profile(g, 4) == analysis.brute_orbit_profile(g, 4)


@settings(max_examples=30, deadline=None)
@given(st.lists(perms4, max_size=3))
def test_profile_chain_on_finite_groups(gens):
    prof = analysis.orbit_profile(FinPermGroup.on_sorted("abcd", gens), 4)
    for n in range(1, 5):
        assert prof.os[n - 1] <= prof.oi[n - 1] <= prof.o[n - 1]


def test_trivial_group_breaks_the_last_inequality():
    # finite groups need not satisfy o_n <= n! * os_n
    prof = analysis.orbit_profile(trivial("abc"), 2)
    assert prof.o[1] == 9 and factorial(2) * prof.os[1] == 6


def test_profiles_of_truncations_match_brute_force():
    for name in ["swap2", "c3_in_s3", "klein_pair"]:
        g, _ = construct.truncate(cons_fixtures()[name][0], 2)
        assert analysis.orbit_profile(g, 3) == analysis.brute_orbit_profile(g, 3)


def test_stable_profile_pure_set():
    prof = analysis.stable_profile(pure_set_expr(), 4)
    assert prof.o == [1, 2, 5, 15]
    assert prof.os == [1, 1, 1, 1]
    assert prof.oi == [1, 1, 1, 1]
    assert not prof.unstable


def test_stable_profile_nested_equivalence():
    assert analysis.stable_profile(en_expr(2), 4).os == [1, 2, 3, 5]
    # one level of nesting is the pure set again
    assert analysis.stable_profile(en_expr(1), 3).os == [1, 1, 1]


def test_product_with_finite_factor():
    prof = analysis.stable_profile(dp(pure_set_expr(), Finite(sym("ab"))), 2)
    assert prof.os[0] == 2


def test_congruence_counts():
    assert len(analysis.congruences(sym("abc"))) == 2
    assert len(analysis.congruences(trivial("abc"))) == 5
    assert len(analysis.congruences(wreath_finite(sym("ab"), 2))) == 3
    cyc = from_cycles("abcd", [[("a", "b", "c", "d")]])
    assert len(analysis.congruences(cyc)) == 3


@settings(max_examples=25, deadline=None)
@given(st.lists(perms4, max_size=2))
def test_congruences_are_invariant_and_join_closed(gens):
    g = FinPermGroup.on_sorted("abcd", gens)
    cong = analysis.congruences(g)
    assert cong[0] == tuple((i,) for i in range(4))
    assert len(cong[-1]) == 1
    for p in cong:
        assert analysis._invariant(g.gens, p, 4)
        for q in cong:
            assert analysis.join(p, q, 4) in cong


def test_closure_and_refinement():
    g = from_cycles("abcd", [[("a", "b"), ("c", "d")]])
    p = analysis.congruence_closure(g.gens, 4, [(0, 2)])
    assert p == ((0, 1, 2, 3),) or p == ((0, 2), (1, 3))
    assert analysis.refines(tuple((i,) for i in range(4)), p)


def test_width_values():
    assert analysis.width(pure_set_expr(), 3).width == 2
    assert analysis.width(pure_set_expr(), 4).width == 2
    assert analysis.width(Finite(sym("abc")), 2).width == 3


def test_width_report_json_marks_surrogate():
    rep = analysis.width(pure_set_expr(), 3).to_json()
    assert rep["surrogate"] is True and rep["width"] == 2


def test_width_of_product_bounded():
    lhs = analysis.width(dp(pure_set_expr(), Finite(sym("ab"))), 2).width
    assert lhs <= analysis.width(pure_set_expr(), 2).width + analysis.width(Finite(sym("ab")), 2).width


def test_stable_acl_default_site():
    rep = analysis.stable_acl(dp(pure_set_expr(), Finite(trivial("x"))), 2)
    assert rep.acl_size == 1  # only the finite point is stable


def test_site_mismatch():
    # invariant at t=2, but its closure at t=3 merges more than it should
    e = cons_fixtures()["klein_pair"][0]
    site = (["c0/a"], [["c0/a"], ["c0/b"], ["c0/c", "c1/d"], ["c0/d", "c1/c"], ["c1/a"], ["c1/b"]])
    with pytest.raises(analysis.SiteMismatch):
        analysis.stable_acl(e, 2, site)


def test_non_invariant_site_rejected():
    from hcell.permcore import NotACongruence

    with pytest.raises(NotACongruence):
        analysis.stable_acl(pure_set_expr(), 3, ((), [["c0/p", "c1/p"], ["c2/p"]]))


@pytest.mark.parametrize("expr, t", [(pure_set_expr(), 3), (en_expr(2), 3),
                                     (cons_fixtures()["c3_in_s3"][0], 2),
                                     (cons_fixtures()["swap2"][0], 3)])
def test_canonical_omega_partition_passes(expr, t):
    g, meta = construct.truncate(expr, t)
    verdict = analysis.omega_partition_check(g, meta, meta.omega_candidate())
    assert verdict["passes"], verdict


def test_corrupted_omega_partitions():
    from hcell.verify import corrupt_omega_candidates

    r4, r5 = corrupt_omega_candidates()
    assert r4["2"] and r4["4"] is False and not r4["passes"]
    assert r5["4"] and r5["5"] is False and not r5["passes"]


def test_omega_partition_find_contains_canonical():
    g, meta = construct.truncate(en_expr(1), 3)
    found = analysis.omega_partition_find(g, 3)
    k, nab, dl = meta.omega_candidate()
    from hcell.permcore import canonical_partition

    keys = {(tuple(a), canonical_partition(b), canonical_partition(c)) for a, b, c in found}
    assert (tuple(k), canonical_partition(nab), canonical_partition(dl)) in keys


def test_estar_lift():
    e = cons_fixtures()["c3_in_s3"][0]
    g, meta = construct.truncate(e, 2)
    from hcell.permcore import restrict_inner, stabilizer

    hx = stabilizer(restrict_inner(e.h, meta.blocks[1], "(Y)"), ["a"])
    for blocks in analysis.congruences(hx):
        lab = [[hx.domain[j] for j in b] for b in blocks]
        lift = analysis.lift_congruence_estar(e, meta, g, 1, "a", lab)
        assert lift["base_congruence"] and lift["lifted_congruence"]
