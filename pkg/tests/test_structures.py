import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcell import construct, structures
from hcell.fixtures import (
    alternating4,
    c5,
    c8,
    directed_triangle,
    en_expr,
    eq2x2,
    marked_eq2x2,
    pure5,
)
from hcell.permcore import Perm, compose, direct_product, sym, wreath_finite
from hcell.structures import RelStruct


def brute_aut(a: RelStruct) -> set:
    """Every permutation preserving each relation exactly."""
    out = set()
    for p in itertools.permutations(range(a.size)):
        if all({tuple(p[x] for x in t) for t in ts} == set(ts) for ts in a.relations.values()):
            out.add(Perm(p))
    return out


random_graphs = st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=8).map(
    lambda edges: RelStruct("abcde", [("R", 2)], {"R": sorted(edges)}))


@settings(max_examples=40, deadline=None)
@given(random_graphs)
def test_aut_group_matches_brute_force(a):
    assert set(structures.aut_group(a).elements()) == brute_aut(a)


@pytest.mark.parametrize("a", [eq2x2(), directed_triangle(), c5(), alternating4(), marked_eq2x2()])
def test_aut_group_fixtures(a):
    assert set(structures.aut_group(a).elements()) == brute_aut(a)


def test_known_orders():
    assert structures.aut_group(c5()).order() == 10  # undirected cycle, dihedral
    assert structures.aut_group(c8()).order() == 16
    assert structures.aut_group(alternating4()).order() == 12
    assert structures.aut_group(eq2x2()).order() == 8


def test_json_roundtrip():
    a = alternating4()
    b = RelStruct.from_json(json.loads(a.dumps()))
    assert b.to_json() == a.to_json()


def test_reduct_and_induced():
    a = marked_eq2x2()
    assert [n for n, _ in a.reduct(["E"]).signature] == ["E"]
    sub = a.induced([0, 1])
    assert sub.size == 2 and len(sub.relations["U"]) == 2


def test_disjoint_union_is_product():
    a, b = eq2x2(), directed_triangle()
    u = structures.aut_group(structures.disjoint_union([a, b]))
    p = direct_product([structures.aut_group(a), structures.aut_group(b)])
    assert u.domain == p.domain and u.elements() == p.elements()


@pytest.mark.parametrize("m", [1, 2, 3])
def test_copies_are_wreaths(m):
    a = directed_triangle()
    c = structures.aut_group(structures.copies_trunc(a, m, rel_name="S"))
    w = wreath_finite(structures.aut_group(a), m)
    assert c.domain == w.domain and c.elements() == w.elements()


def test_copies_name_clash():
    with pytest.raises(structures.SignatureClash):
        structures.copies_trunc(eq2x2(), 2)


@pytest.mark.parametrize("n, t", [(0, 3), (1, 3), (2, 2), (2, 3)])
def test_en_family_mirrors_wreath(n, t):
    a = structures.aut_group(structures.en_family(n, t))
    g, _ = construct.truncate(en_expr(n), t)
    assert a.domain == g.domain and a.elements() == g.elements()


@pytest.mark.parametrize("a", [eq2x2(), directed_triangle(), c5(), alternating4()])
def test_delta_m_keeps_automorphisms(a):
    for m in (a.max_arity(), a.max_arity() + 1):
        d = structures.delta_m(a, m)
        assert structures.aut_group(d).elements() == structures.aut_group(a).elements()
        assert structures.homog_check(d, m, 3).passes


def test_homog_equivalence_passes():
    assert structures.homog_check(eq2x2(), 2, 4).passes


def test_homog_alternating_fails_with_counterexample():
    rep = structures.homog_check(alternating4(), 2, 3)
    assert not rep.passes
    u, v = rep.counterexample["u"], rep.counterexample["v"]
    g = structures.aut_group(alternating4())
    iu = [g.index_of(x) for x in u]
    iv = [g.index_of(x) for x in v]
    # the pair is in distinct orbits ...
    assert not any([p[x] for x in iu] == iv for p in g.elements())
    # ... yet every pair of coordinates lies in one orbit
    for i, j in itertools.product(range(len(u)), repeat=2):
        assert any((p[iu[i]], p[iu[j]]) == (iv[i], iv[j]) for p in g.elements())


def test_c8_with_orbit_types():
    # orbit types of C8 are already determined by pairs up to 4-tuples
    assert structures.homog_check(c8(), 2, 4).passes


def test_canonical_form_is_isomorphism_invariant():
    a = c5()
    p = (2, 4, 1, 0, 3)
    edges = [(p[x], p[y]) for x, y in a.relations["R"]]
    b = RelStruct(a.domain, a.signature, {"R": edges})
    assert structures.canonical_form(a) == structures.canonical_form(b)
    assert structures.canonical_form(a) != structures.canonical_form(directed_triangle())


def test_embeddings_of_edge_into_cycle():
    edge = structures.graph("xy", [("x", "y")])
    assert len(list(structures.embeddings(edge, c5()))) == 10  # each edge, both ways
    assert structures.embeds(edge, c5())
    assert not structures.embeds(directed_triangle(), c5())


def test_pure_set_bound():
    rep = structures.boundedness_scan(pure5(), 6)
    assert [o.size for o in rep.obstructions] == [6]
    assert rep.bound == 6 and rep.complete


def test_incomplete_horizon_flagged():
    rep = structures.boundedness_scan(pure5(), 4)
    assert rep.obstructions == [] and not rep.complete


@pytest.mark.parametrize("a, s", [(c5(), 4), (eq2x2(), 5), (directed_triangle(), 3)])
def test_forb_roundtrip(a, s):
    obs = structures.boundedness_scan(a, s).obstructions
    assert structures.forb_check(a, obs, s)["agrees"]
    if obs:
        assert not structures.forb_check(a, obs[:-1], s)["agrees"]


def test_merge_expansions():
    from hcell.verify import merge_cases

    a, b, cs = merge_cases()
    bound = structures.boundedness_scan(a, a.size + 1).bound
    for c in cs:
        r = structures.merge_expansions_check(b, a, c, list(c.domain[:bound + 1]))
        assert r["agrees"], c.to_json()


def test_merge_needs_complete_horizon():
    a = marked_eq2x2()
    with pytest.raises(structures.HorizonTooSmall):
        structures.merge_expansions_check(a.reduct(["E"]), a, eq2x2(), list("abcd"), horizon=3)


def test_aut_composition_closed():
    g = structures.aut_group(eq2x2())
    elems = g.elements()
    assert all(Perm(compose(p, q)) in elems for p in elems for q in elems)
    assert g.order() < sym("abcd").order()
