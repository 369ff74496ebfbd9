"""Orbit counts, congruence lattices, stable algebraic closure and width,
and the five-condition check for a fixed/coarse/fine partition triple."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

from .construct import TruncationMeta, truncate
from .expr import Cons
from .permcore import (
    CapExceeded,
    FinPermGroup,
    NotACongruence,
    Perm,
    canonical_partition,
    compose,
    label_str,
    parse_label,
    quotient_by_congruence,
    restrict_inner,
    stabilizer,
)


class Unstable(RuntimeError):
    def __init__(self, n: int):
        super().__init__(f"orbit counts at n={n} differ between truncations n and n+1")
        self.n = n


class SiteMismatch(ValueError):
    pass


# ---------------------------------------------------------------- orbit counts


@dataclass
class OrbitProfile:
    o: list  # orbits on n-tuples, n = 1..n_max
    oi: list  # orbits on injective n-tuples
    os: list  # orbits on n-subsets
    unstable: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"o": self.o, "oi": self.oi, "os": self.os}
        if self.unstable:
            out["unstable"] = self.unstable
        return out


def stirling2(n: int, k: int) -> int:
    row = [1] + [0] * k
    for i in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k] if n else int(k == 0)


def _set_orbit_stats(gens, n: int, size: int) -> tuple[int, int]:
    """(orbits on size-subsets, orbits on injective size-tuples).

    Each subset orbit is walked once; alongside it we keep, for every subset
    reached, the image of a fixed ordering of the base subset.  Comparing two
    orderings of the same subset gives Schreier elements of the setwise
    stabiliser restricted to the subset, whose order fixes how many tuple
    orbits sit over the subset orbit.
    """
    gens = [tuple(g) for g in gens]
    seen: set = set()
    n_sets = n_tuples = 0
    fact = factorial(size)
    for s in itertools.combinations(range(n), size):
        if s in seen:
            continue
        n_sets += 1
        order = {s: s}
        seen.add(s)
        stack = [s]
        schreier = set()
        while stack:
            cur = order[stack.pop()]
            for g in gens:
                img = tuple(g[x] for x in cur)
                key = tuple(sorted(img))
                if key in order:
                    ref = order[key]
                    schreier.add(tuple(ref.index(y) for y in img))
                else:
                    order[key] = img
                    seen.add(key)
                    stack.append(key)
        n_tuples += fact // len(_close_small(schreier, size))
    return n_sets, n_tuples


def _close_small(gens, size: int) -> set:
    ident = tuple(range(size))
    out = {ident}
    frontier = [ident]
    gens = [g for g in gens if g != ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = compose(g, p)
                if q not in out:
                    out.add(q)
                    nxt.append(q)
        frontier = nxt
    return out


def orbit_profile(g: FinPermGroup, n_max: int) -> OrbitProfile:
    os_, oi = [], []
    for size in range(1, n_max + 1):
        if size > g.degree:
            os_.append(0)
            oi.append(0)
            continue
        a, b = _set_orbit_stats(g.gens, g.degree, size)
        os_.append(a)
        oi.append(b)
    o = [sum(stirling2(n, j) * oi[j - 1] for j in range(1, n + 1)) for n in range(1, n_max + 1)]
    return OrbitProfile(o, oi, os_)


def tuple_orbit_ids(gens, n: int, size: int, cap: int = 5 * 10**6) -> dict:
    """Orbit id of every ``size``-tuple over ``range(n)`` by union-find."""
    if n**size > cap:
        raise CapExceeded(cap, "tuples")
    tuples = list(itertools.product(range(n), repeat=size))
    index = {u: i for i, u in enumerate(tuples)}
    parent = list(range(len(tuples)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, u in enumerate(tuples):
            a, b = find(i), find(index[tuple(g[x] for x in u)])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return {u: find(i) for i, u in enumerate(tuples)}


def brute_orbit_profile(g: FinPermGroup, n_max: int) -> OrbitProfile:
    """Reference counts straight from the tuple and subset spaces."""
    o, oi, os_ = [], [], []
    for size in range(1, n_max + 1):
        ids = tuple_orbit_ids(g.gens, g.degree, size)
        o.append(len(set(ids.values())))
        oi.append(len({v for u, v in ids.items() if len(set(u)) == size}))
        subsets = list(itertools.combinations(range(g.degree), size))
        index = {s: i for i, s in enumerate(subsets)}
        uf = _UF(len(subsets))
        for gen in g.gens:
            for s in subsets:
                uf.union(index[s], index[tuple(sorted(gen[x] for x in s))])
        os_.append(len({uf.find(i) for i in range(len(subsets))}))
    return OrbitProfile(o, oi, os_)


def stable_profile(e, n_max: int, strict: bool = True) -> OrbitProfile:
    """Counts at truncation ``max(n, 1)`` confirmed at ``n + 1``."""
    per_t = {}
    for t in range(1, n_max + 2):
        g, _ = truncate(e, t)
        per_t[t] = orbit_profile(g, min(t, n_max))
    o, oi, os_, bad = [], [], [], []
    for n in range(1, n_max + 1):
        lo, hi = per_t[n], per_t[n + 1]
        triple = (lo.o[n - 1], lo.oi[n - 1], lo.os[n - 1])
        if triple != (hi.o[n - 1], hi.oi[n - 1], hi.os[n - 1]):
            if strict:
                raise Unstable(n)
            bad.append(n)
        o.append(triple[0])
        oi.append(triple[1])
        os_.append(triple[2])
    return OrbitProfile(o, oi, os_, bad)


# ---------------------------------------------------------------- congruences


class _UF:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.parent[max(a, b)] = min(a, b)
        return True

    def blocks(self) -> tuple:
        out: dict = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return canonical_partition(out.values())


def congruence_closure(gens, n: int, pairs) -> tuple:
    """Finest invariant partition containing ``pairs``."""
    uf = _UF(n)
    queue = []
    for a, b in pairs:
        if uf.union(a, b):
            queue.append((a, b))
    gens = [tuple(g) for g in gens]
    while queue:
        a, b = queue.pop()
        for g in gens:
            if uf.union(g[a], g[b]):
                queue.append((g[a], g[b]))
    return uf.blocks()


def partition_pairs(blocks):
    for b in blocks:
        for x in b[1:]:
            yield b[0], x


def join(p, q, n: int) -> tuple:
    uf = _UF(n)
    for a, b in itertools.chain(partition_pairs(p), partition_pairs(q)):
        uf.union(a, b)
    return uf.blocks()


def refines(fine, coarse) -> bool:
    where = {x: i for i, b in enumerate(coarse) for x in b}
    return all(len({where[x] for x in b}) == 1 for b in fine)


def congruences(g: FinPermGroup, cap: int = 10**5) -> list:
    """All invariant partitions, finest first."""
    n = g.degree
    gens = list(g.gens)
    bottom = tuple((i,) for i in range(n))
    principal = sorted({congruence_closure(gens, n, [(a, b)])
                        for a in range(n) for b in range(a + 1, n)})
    found = {bottom}
    frontier = [bottom]
    while frontier:
        nxt = []
        for p in frontier:
            for q in principal:
                r = join(p, q, n)
                if r not in found:
                    found.add(r)
                    if len(found) > cap:
                        raise CapExceeded(cap, "congruences")
                    nxt.append(r)
        frontier = nxt
    return sorted(found, key=lambda p: (-len(p), p))


def partition_labels(g: FinPermGroup, blocks) -> list:
    return [[label_str(g.domain[i]) for i in b] for b in blocks]


def partition_indices(g: FinPermGroup, blocks) -> tuple:
    return canonical_partition(
        [x if isinstance(x, int) else g.index_of(parse_label(x)) for x in b] for b in blocks)


# ---------------------------------------------------------------- acl and width


@dataclass
class AclReport:
    t: int
    classes: list  # classes in stable orbits (labels at t)
    orbits: list  # per orbit at t: (size at t, size at t+1, stable)
    acl_size: int

    def to_json(self) -> dict:
        return {"t": self.t, "acl_size": self.acl_size, "classes": self.classes,
                "orbits": [{"size_t": a, "size_next": b, "stable": s} for a, b, s in self.orbits]}


def _class_orbits(gens, blocks) -> list:
    where = {x: i for i, b in enumerate(blocks) for x in b}
    uf = _UF(len(blocks))
    for g in gens:
        for i, b in enumerate(blocks):
            uf.union(i, where[g[b[0]]])
    out: dict = {}
    for i in range(len(blocks)):
        out.setdefault(uf.find(i), []).append(i)
    return list(out.values())


def _site_gens(g: FinPermGroup, points) -> list:
    if not points:
        return list(g.gens)
    return list(stabilizer(g, points).gens)


def _acl(g_lo, gens_lo, g_hi, gens_hi, blocks_lo, t) -> AclReport:
    n_lo = g_lo.degree
    if not _invariant(gens_lo, blocks_lo, n_lo):
        raise NotACongruence("site partition is not invariant under the site group")
    lift = [g_hi.index_of(g_lo.domain[i]) for i in range(n_lo)]
    pairs = [(lift[a], lift[b]) for a, b in partition_pairs(blocks_lo)]
    blocks_hi = congruence_closure(gens_hi, g_hi.degree, pairs)
    where_hi = {x: i for i, b in enumerate(blocks_hi) for x in b}
    back = {i: lift.index(i) for i in lift}
    trace = canonical_partition([back[x] for x in b if x in back] for b in blocks_hi)
    if trace != canonical_partition(blocks_lo):
        raise SiteMismatch("site partition does not extend to the next truncation")
    orb_hi = _class_orbits(gens_hi, blocks_hi)
    orbit_of_hi = {c: j for j, o in enumerate(orb_hi) for c in o}
    classes, orbits = [], []
    for o in _class_orbits(gens_lo, blocks_lo):
        image = {where_hi[lift[blocks_lo[c][0]]] for c in o}
        targets = {orbit_of_hi[c] for c in image}
        size_hi = len(orb_hi[next(iter(targets))]) if len(targets) == 1 else -1
        stable = len(targets) == 1 and size_hi == len(o) and set(orb_hi[next(iter(targets))]) == image
        orbits.append((len(o), size_hi, stable))
        if stable:
            classes.extend(sorted([label_str(g_lo.domain[x]) for x in blocks_lo[c]] for c in o))
    orbits.sort()
    return AclReport(t, sorted(classes), orbits, len(classes))


def _invariant(gens, blocks, n) -> bool:
    where = {x: i for i, b in enumerate(blocks) for x in b}
    if len(where) != n:
        return False
    return all(len({where[g[x]] for x in b}) == 1 for g in gens for b in blocks)


def stable_acl(e, t: int, site=None) -> AclReport:
    """Orbits of the site group on the site quotient whose sizes agree at
    truncations ``t`` and ``t+1``; their classes form the reported closure.

    ``site`` is ``(points, partition)`` with labels at truncation ``t``; the
    partition defaults to equality.
    """
    g_lo, _ = truncate(e, t)
    g_hi, _ = truncate(e, t + 1)
    points, blocks = site if site is not None else ((), None)
    points = [parse_label(p) for p in points]
    if blocks is None:
        blocks = [(i,) for i in range(g_lo.degree)]
    blocks = partition_indices(g_lo, blocks)
    return _acl(g_lo, _site_gens(g_lo, points), g_hi, _site_gens(g_hi, points), blocks, t)


@dataclass
class WidthReport:
    t: int
    width: int
    witness: dict
    sites: int
    skipped: int

    def to_json(self) -> dict:
        return {"t": self.t, "width": self.width, "witness": self.witness,
                "sites_checked": self.sites, "sites_skipped": self.skipped,
                "surrogate": True}


def width(e, t: int) -> WidthReport:
    g_lo, _ = truncate(e, t)
    g_hi, _ = truncate(e, t + 1)
    best, witness, sites, skipped = -1, {}, 0, 0
    for orb in g_lo.orbits():
        x = g_lo.domain[orb[0]]
        st_lo = stabilizer(g_lo, [x])
        gens_hi = _site_gens(g_hi, [x])
        for blocks in congruences(st_lo):
            try:
                rep = _acl(g_lo, st_lo.gens, g_hi, gens_hi, blocks, t)
            except SiteMismatch:
                skipped += 1
                continue
            sites += 1
            if rep.acl_size > best:
                best = rep.acl_size
                witness = {"point": label_str(x), "partition": partition_labels(g_lo, blocks),
                           "acl": rep.classes}
    return WidthReport(t, max(best, 0), witness, sites, skipped)


# ---------------------------------------------------------------- partition triples


def _as_indices(g, items):
    return [x if isinstance(x, int) else g.index_of(parse_label(x)) for x in items]


def omega_partition_check(g: FinPermGroup, t, candidate) -> dict:
    """Verdicts for conditions 1..5 on ``(K, coarse, fine)``.

    ``t`` may be an int or a truncation record.  The coarse and fine
    partitions live on the complement of ``K``.
    """
    if isinstance(t, TruncationMeta):
        t = t.t
    k_raw, nab_raw, dl_raw = candidate
    k_set = set(_as_indices(g, k_raw))
    nabla = canonical_partition(_as_indices(g, b) for b in nab_raw)
    delta = canonical_partition(_as_indices(g, b) for b in dl_raw)
    rest = [i for i in range(g.degree) if i not in k_set]
    out = {"1": all(s[i] in k_set for s in g.gens for i in k_set)}
    covered = lambda p: sorted(x for b in p for x in b) == rest  # noqa: E731
    inv = lambda p: all(len({_where(p)[s[x]] for x in b}) == 1 for s in g.gens for b in p)  # noqa: E731
    out["2"] = bool(out["1"] and covered(nabla) and covered(delta)
                    and inv(nabla) and inv(delta) and refines(delta, nabla))
    out["coarse_classes"] = len(nabla)
    out["3"] = True
    if not out["2"]:
        out["4"] = out["5"] = None
    else:
        dwhere = _where(delta)
        out["4"] = all(len({dwhere[x] for x in c}) == t for c in nabla)
        ok5 = True
        for c in nabla:
            local = restrict_inner(g, [g.domain[i] for i in c], "((Y))")
            sub = [b for b in delta if b[0] in set(c)]
            labels = [[g.domain[i] for i in b] for b in sub]
            q = quotient_by_congruence(local, labels)
            if q.order() != factorial(len(sub)):
                ok5 = False
                break
        out["5"] = ok5
    out["passes"] = all(out[k] for k in "12345")
    return out


def _where(p) -> dict:
    return {x: i for i, b in enumerate(p) for x in b}


def omega_partition_find(g: FinPermGroup, t: int, max_orbits: int = 12) -> list:
    """Every ``(K, coarse, fine)`` passing all five conditions."""
    orbs = g.orbits()
    if len(orbs) > max_orbits:
        raise CapExceeded(2**max_orbits, "fixed-part candidates")
    found = []
    for r in range(len(orbs) + 1):
        for pick in itertools.combinations(range(len(orbs)), r):
            k_set = sorted(x for j in pick for x in orbs[j])
            rest = [i for i in range(g.degree) if i not in set(k_set)]
            if not rest:
                found.append((tuple(k_set), (), ()))
                continue
            pos = {x: j for j, x in enumerate(rest)}
            gens = [tuple(pos[s[x]] for x in rest) for s in g.gens]
            sub = FinPermGroup.on_sorted([g.domain[i] for i in rest], gens)
            cong = congruences(sub)
            for nab in cong:
                for dl in cong:
                    if not refines(dl, nab):
                        continue
                    cand = (tuple(k_set),
                            tuple(tuple(rest[x] for x in b) for b in nab),
                            tuple(tuple(rest[x] for x in b) for b in dl))
                    if omega_partition_check(g, t, cand)["passes"]:
                        found.append(cand)
    return found


def candidate_labels(g: FinPermGroup, cand) -> dict:
    k_set, nab, dl = cand
    return {"K": [label_str(g.domain[i]) for i in k_set],
            "coarse": partition_labels(g, nab), "fine": partition_labels(g, dl)}


# ---------------------------------------------------------------- lifted site


def lift_congruence_estar(e: Cons, meta: TruncationMeta, g: FinPermGroup, i: int, x, blocks) -> dict:
    """Extend a congruence of a point stabiliser inside one block to the whole
    truncation.  Returns the lifted partition (indices) and validity checks."""
    x = parse_label(x)
    ys = meta.blocks[i]
    h_i = restrict_inner(e.h, ys, "(Y)")
    hx = stabilizer(h_i, [x])
    local = partition_indices(hx, blocks)
    base_ok = _invariant(hx.gens, local, hx.degree)
    lifted = []
    if meta.y0:
        lifted.append(tuple(meta.y0))
    for j, cls in enumerate(meta.nabla):
        bj = meta.copy_of[cls[0]][0]
        if bj not in (0, i):
            lifted.append(cls)
    for n in range(1, meta.t):
        lifted.append(tuple(meta.point_of[n, a] for a in ys))
    for b in local:
        lifted.append(tuple(meta.point_of[0, hx.domain[j]] for j in b))
    lifted = canonical_partition(lifted)
    px = meta.domain[meta.point_of[0, x]]
    st = stabilizer(g, [px])
    return {"partition": lifted, "point": px, "base_congruence": base_ok,
            "lifted_congruence": _invariant(st.gens, lifted, g.degree),
            "base_classes": len(local)}
