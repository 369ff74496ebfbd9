import itertools
import random
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcell import construct
from hcell.expr import Cons, Finite, dp, wr
from hcell.fixtures import cons_fixtures, en_expr
from hcell.permcore import Perm, compose, from_cycles, inverse, subgroup_relation, sym, trivial, wreath_finite

FIXTURES = cons_fixtures()
NAMES = sorted(FIXTURES)


def cases():
    for name in NAMES:
        e, ts = FIXTURES[name]
        for t in ts:
            yield name, t


@pytest.mark.parametrize("name, t", list(cases()))
def test_generated_group_equals_membership_set(name, t):
    e = FIXTURES[name][0]
    g, _ = construct.truncate(e, t)
    assert construct.cons_oracle_elements(e, t) == set(g.elements())


@pytest.mark.parametrize("name, t", list(cases()))
def test_index_over_normal_part(name, t):
    e = FIXTURES[name][0]
    index = subgroup_relation(construct.cons_normal_core(e), e.h)["index"]
    g, _ = construct.truncate(e, t)
    gn, _ = construct.truncate(construct.normal_only(e), t)
    assert g.order() == gn.order() * index


@pytest.mark.parametrize("name, t", list(cases()))
def test_recover_base(name, t):
    e = FIXTURES[name][0]
    g, meta = construct.truncate(e, t)
    assert construct.recover_base(g, meta).elements() == e.h.elements()


@pytest.mark.parametrize("name", NAMES)
def test_block_respecting_count_matches_enumeration(name):
    _, meta = construct.truncate(FIXTURES[name][0], 2)
    perms = list(construct.block_respecting_perms(meta))
    assert len(perms) == len(set(perms)) == construct.block_respecting_count(meta)


def test_oracle_is_an_honest_filter():
    # with no h-generators beyond N the oracle set equals the normal part truncation
    e = FIXTURES["swap2"][0]
    ne = construct.normal_only(e)
    g, _ = construct.truncate(ne, 3)
    assert construct.cons_oracle_elements(ne, 3) == set(g.elements())
    assert g.order() == factorial(3)


def test_truncation_of_wreath_is_finite_wreath():
    for k, t in [(1, 3), (2, 2), (3, 2)]:
        g, meta = construct.truncate(wr(Finite(sym("abc"[:k]))), t)
        assert g.elements() == wreath_finite(sym("abc"[:k]), t).elements()
        assert meta.k == 1 and len(meta.delta) == t


def test_meta_of_product():
    g, meta = construct.truncate(dp(en_expr(1), Finite(sym("xy"))), 2)
    assert g.order() == 2 * 2
    assert meta.k == 1
    assert len(meta.blocks[0]) == 2  # the finite factor sits in the fixed part


@pytest.mark.parametrize("name", NAMES)
def test_decompose_reassemble(name):
    e, ts = FIXTURES[name]
    g, meta = construct.truncate(e, ts[-1])
    elems = sorted(g.elements())
    for s in random.Random(3).sample(elems, min(50, len(elems))):
        assert construct.reassemble(construct.decompose(s, meta), meta) == s


@pytest.mark.parametrize("name", NAMES)
def test_rho_identities(name):
    e, ts = FIXTURES[name]
    g, meta = construct.truncate(e, 2)
    elems = sorted(g.elements())
    sample = random.Random(5).sample(elems, min(8, len(elems)))
    for s, u in itertools.product(sample, repeat=2):
        for v in meta.vectors():
            assert construct.rho_compose_check(s, u, meta, v)


def test_rho_negative_control():
    g, meta = construct.truncate(FIXTURES["swap2"][0], 2)
    s = next(x for x in sorted(g.elements()) if not x.is_identity())
    ds = construct.decompose(s, meta)
    prod = construct.decompose(compose(s, s), meta)
    v = next(iter(prod.rho))
    prod.rho[v] = Perm(reversed(prod.rho[v]))
    res = construct.check_rho_identities(ds, ds, prod, construct.decompose(inverse(s), meta), v)
    assert res["product"] is False


def test_membership_verdict_reports_first_failure():
    e = FIXTURES["c3_in_s3"][0]
    g, meta = construct.truncate(e, 2)
    ident = g.identity()
    assert construct.membership_abcd(ident, e, meta).member
    # swap two copies of a single point only: breaks the copy partition
    a0, a1 = g.index_of("c0/a"), g.index_of("c1/a")
    img = list(ident)
    img[a0], img[a1] = a1, a0
    v = construct.membership_abcd(Perm(img), e, meta)
    assert v.b is False and v.c is None and not v.member
    # transposition (a b) in copy 0 only: rho values differ outside N
    img = list(ident)
    a, b = g.index_of("c0/a"), g.index_of("c0/b")
    img[a], img[b] = b, a
    v = construct.membership_abcd(Perm(img), e, meta)
    assert v.c is True and v.d is False


def test_membership_fixed_part():
    e = FIXTURES["fixed_pair"][0]
    g, meta = construct.truncate(e, 2)
    img = list(g.identity())
    a, z = g.index_of("c0/a"), g.index_of("c0/z")
    img[a], img[z] = z, a
    v = construct.membership_abcd(Perm(img), e, meta)
    assert v.a is False and v.failure.startswith("(a)")


def test_diagonal_lift_rejects_block_mixing():
    e = Cons([], [trivial("a"), trivial("bc")], trivial("abc"))
    _, meta = construct.truncate(e, 2)
    with pytest.raises(construct.NotNormalizing):
        construct.diagonal_lift(Perm((1, 0, 2)), meta)


def test_diagonal_extend_rebuilds_group():
    e = FIXTURES["klein_pair"][0]
    g, meta = construct.truncate(e, 2)
    gn, mn = construct.truncate(construct.normal_only(e), 2)
    for s in e.h.gens:
        gn = construct.diagonal_extend(gn, mn, s)
    assert gn.elements() == g.elements()


def test_truncate_rejects_zero():
    with pytest.raises(ValueError):
        construct.truncate(en_expr(1), 0)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(NAMES), st.integers(0, 10**6))
def test_products_of_members_are_members(name, seed):
    e = FIXTURES[name][0]
    g, meta = construct.truncate(e, 2)
    elems = sorted(g.elements())
    rng = random.Random(seed)
    s, u = rng.choice(elems), rng.choice(elems)
    assert construct.membership_abcd(Perm(compose(s, u)), e, meta).member


def test_normal_part_of_c3_in_s3():
    e = FIXTURES["c3_in_s3"][0]
    core = construct.cons_normal_core(e)
    assert core.order() == 3
    assert subgroup_relation(core, e.h)["normal"]
    assert from_cycles("abcz", [[("a", "b", "c")]]).elements() == core.elements()
