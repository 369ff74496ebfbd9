"""Finite relational structures: automorphisms, copies and unions, orbit
expansions, homogenisability, forbidden substructures and expansion merging."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .analysis import tuple_orbit_ids
from .permcore import (
    CapExceeded,
    DEFAULT_ELEM_CAP,
    FinPermGroup,
    Perm,
    base,
    block_tag,
    copy_tag,
    label_str,
    parse_label,
    prefixed,
)


class SignatureClash(ValueError):
    pass


class HorizonTooSmall(ValueError):
    pass


@dataclass(eq=False)
class RelStruct:
    domain: tuple  # labels, in the given order
    signature: tuple  # ((name, arity), ...)
    relations: dict  # name -> frozenset of index tuples

    def __post_init__(self):
        self.domain = tuple(parse_label(x) for x in self.domain)
        self.signature = tuple((str(n), int(a)) for n, a in self.signature)
        names = [n for n, _ in self.signature]
        if len(set(names)) != len(names):
            raise SignatureClash("repeated relation name")
        rels = {}
        for name, arity in self.signature:
            tuples = frozenset(tuple(t) for t in self.relations.get(name, ()))
            if any(len(t) != arity for t in tuples):
                raise ValueError(f"relation {name} has a tuple of the wrong arity")
            rels[name] = tuples
        self.relations = rels

    @property
    def size(self) -> int:
        return len(self.domain)

    def arity(self, name: str) -> int:
        return dict(self.signature)[name]

    def max_arity(self) -> int:
        return max([2] + [a for _, a in self.signature])

    def __eq__(self, other) -> bool:
        return (isinstance(other, RelStruct) and self.domain == other.domain
                and self.signature == other.signature and self.relations == other.relations)

    def to_json(self) -> dict:
        lab = [label_str(x) for x in self.domain]
        return {"domain": lab,
                "sig": [{"name": n, "arity": a} for n, a in self.signature],
                "rels": {n: [[lab[i] for i in t] for t in sorted(self.relations[n])]
                         for n, _ in self.signature}}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> "RelStruct":
        if isinstance(data, str):
            data = json.loads(data)
        dom = [parse_label(x) for x in data["domain"]]
        pos = {x: i for i, x in enumerate(dom)}
        if len(pos) != len(dom):
            raise ValueError("duplicate labels in domain")
        sig = [(s["name"], s["arity"]) for s in data.get("sig", [])]
        rels = {n: [tuple(pos[parse_label(x)] for x in t) for t in ts]
                for n, ts in data.get("rels", {}).items()}
        unknown = set(rels) - {n for n, _ in sig}
        if unknown:
            raise SignatureClash(f"relations outside the signature: {sorted(unknown)}")
        return cls(dom, sig, rels)

    def induced(self, points) -> "RelStruct":
        """Substructure on the given point indices (kept in the given order)."""
        pos = {p: i for i, p in enumerate(points)}
        rels = {n: [tuple(pos[x] for x in t) for t in ts if all(x in pos for x in t)]
                for n, ts in self.relations.items()}
        return RelStruct([self.domain[p] for p in points], self.signature, rels)

    def reduct(self, names) -> "RelStruct":
        names = set(names)
        sig = [(n, a) for n, a in self.signature if n in names]
        return RelStruct(self.domain, sig, {n: self.relations[n] for n, _ in sig})


def graph(labels, edges, name: str = "R") -> RelStruct:
    """Symmetric binary structure from an edge list of labels."""
    pos = {parse_label(x): i for i, x in enumerate(labels)}
    rel = set()
    for a, b in edges:
        rel.add((pos[parse_label(a)], pos[parse_label(b)]))
        rel.add((pos[parse_label(b)], pos[parse_label(a)]))
    return RelStruct(labels, [(name, 2)], {name: rel})


def equivalence(classes, name: str = "E") -> RelStruct:
    labels = [x for c in classes for x in c]
    pos = {x: i for i, x in enumerate(labels)}
    rel = {(pos[a], pos[b]) for c in classes for a in c for b in c}
    return RelStruct(labels, [(name, 2)], {name: rel})


def pure_set(labels) -> RelStruct:
    return RelStruct(labels, [], {})


# ---------------------------------------------------------------- automorphisms


def _point_invariants(a: RelStruct) -> list:
    inv = [[] for _ in range(a.size)]
    for name, arity in a.signature:
        counts = [[0] * (arity + 1) for _ in range(a.size)]
        for t in a.relations[name]:
            diag = len(set(t)) == 1
            for pos, x in enumerate(t):
                counts[x][pos] += 1
            if diag:
                counts[t[0]][arity] += 1
        for x in range(a.size):
            inv[x].append(tuple(counts[x]))
    return [tuple(v) for v in inv]


def _relation_checks(a: RelStruct):
    """For each point, relation tuples whose largest index is that point."""
    by_last = [[] for _ in range(a.size)]
    for name, arity in a.signature:
        rel = a.relations[name]
        for t in itertools.product(range(a.size), repeat=arity):
            if t:
                by_last[max(t)].append((name, t, t in rel))
    return by_last


def isomorphisms(a: RelStruct, b: RelStruct, limit: int | None = None, cap: int = DEFAULT_ELEM_CAP):
    """Yield bijections ``a -> b`` (as image lists) preserving all relations."""
    if a.size != b.size or a.signature != b.signature:
        return
    ia, ib = _point_invariants(a), _point_invariants(b)
    if sorted(ia) != sorted(ib):
        return
    checks = _relation_checks(a)
    n = a.size
    img = [-1] * n
    used = [False] * n
    found = 0

    def ok(x):
        for name, t, inside in checks[x]:
            if (tuple(img[y] for y in t) in b.relations[name]) != inside:
                return False
        return True

    def rec(x):
        nonlocal found
        if x == n:
            found += 1
            if found > cap:
                raise CapExceeded(cap, "automorphisms")
            yield list(img)
            return
        for y in range(n):
            if not used[y] and ia[x] == ib[y]:
                img[x], used[y] = y, True
                if ok(x):
                    yield from rec(x + 1)
                used[y] = False
        img[x] = -1

    for sol in rec(0):
        yield sol
        if limit is not None and found >= limit:
            return


def aut_group(a: RelStruct, cap: int = DEFAULT_ELEM_CAP) -> FinPermGroup:
    """Automorphism group on the sorted domain."""
    order = sorted(range(a.size), key=lambda i: a.domain[i])
    pos = {old: new for new, old in enumerate(order)}
    elems = []
    for sol in isomorphisms(a, a, cap=cap):
        elems.append(Perm(pos[sol[order[i]]] for i in range(a.size)))
    return FinPermGroup.from_elements([a.domain[i] for i in order], elems, cap)


# ---------------------------------------------------------------- builders


def disjoint_union(parts) -> RelStruct:
    sig: dict = {}
    for p in parts:
        for n, ar in p.signature:
            if sig.setdefault(n, ar) != ar:
                raise SignatureClash(f"relation {n} has two arities")
    for i in range(1, len(parts) + 1):
        if f"U{i}" in sig:
            raise SignatureClash(f"relation name U{i} is reserved for the part predicates")
    dom, rels, offset = [], {n: set() for n in sig}, 0
    for i, p in enumerate(parts, start=1):
        dom.extend(prefixed(block_tag(i - 1), x) for x in p.domain)
        for n, ts in p.relations.items():
            rels[n].update(tuple(offset + x for x in t) for t in ts)
        rels[f"U{i}"] = {(offset + x,) for x in range(p.size)}
        offset += p.size
    signature = list(sig.items()) + [(f"U{i}", 1) for i in range(1, len(parts) + 1)]
    return RelStruct(dom, signature, rels)


def copies_trunc(a: RelStruct, m: int, rel_name: str = "E") -> RelStruct:
    """``m`` copies of ``a`` with a binary relation joining points of the same copy."""
    if rel_name in dict(a.signature):
        raise SignatureClash(f"relation {rel_name} already present")
    n = a.size
    dom = [prefixed(copy_tag(c), x) for c in range(m) for x in a.domain]
    rels = {name: {tuple(c * n + x for x in t) for c in range(m) for t in ts}
            for name, ts in a.relations.items()}
    rels[rel_name] = {(c * n + x, c * n + y) for c in range(m) for x in range(n) for y in range(n)}
    return RelStruct(dom, list(a.signature) + [(rel_name, 2)], rels)


def en_family(n: int, t: int) -> RelStruct:
    """``t**n`` points labelled by copy paths with nested equivalences
    ``E1 .. En``; ``Ei`` identifies points agreeing on the outer ``n-i`` copy indices."""
    paths = list(itertools.product(range(t), repeat=n))
    dom = [tuple(copy_tag(c) for c in p) + (base("p"),) for p in paths]
    rels = {}
    for i in range(1, n + 1):
        keep = n - i
        rels[f"E{i}"] = {(x, y) for x, p in enumerate(paths) for y, q in enumerate(paths)
                         if p[:keep] == q[:keep]}
    return RelStruct(dom, [(f"E{i}", 2) for i in range(1, n + 1)], rels)


def delta_m(a: RelStruct, m: int) -> RelStruct:
    """One ``m``-ary relation per automorphism orbit on ``m``-tuples."""
    g = aut_group(a)
    order = [g.index_of(x) for x in a.domain]  # struct index -> group index
    back = {gi: si for si, gi in enumerate(order)}
    ids = tuple_orbit_ids(g.gens, g.degree, m)
    orbits: dict = {}
    for u, v in ids.items():
        orbits.setdefault(v, []).append(tuple(back[x] for x in u))
    ordered = sorted((sorted(ts) for ts in orbits.values()), key=lambda ts: ts[0])
    sig = [(f"O{j}", m) for j in range(len(ordered))]
    return RelStruct(a.domain, sig, {f"O{j}": ts for j, ts in enumerate(ordered)})


# ---------------------------------------------------------------- homogenisability


@dataclass
class HomogReport:
    m: int
    n_max: int
    passes: bool
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return {"m": self.m, "n_max": self.n_max, "passes": self.passes,
                "counterexample": self.counterexample}


def homog_check(a: RelStruct, m: int, n_max: int, group: FinPermGroup | None = None) -> HomogReport:
    """Whether tuples in distinct automorphism orbits are always told apart by
    some ``m``-projection, for tuple lengths up to ``n_max``."""
    g = group or aut_group(a)
    m_ids = tuple_orbit_ids(g.gens, g.degree, m)
    for n in range(1, n_max + 1):
        ids = tuple_orbit_ids(g.gens, g.degree, n)
        maps = list(itertools.product(range(n), repeat=m))
        seen: dict = {}
        for u, orb in ids.items():
            prof = tuple(m_ids[tuple(u[j] for j in pi)] for pi in maps)
            other = seen.setdefault(prof, u)
            if ids[other] != orb:
                lab = lambda w: [label_str(g.domain[x]) for x in w]  # noqa: E731
                return HomogReport(m, n_max, False, {"n": n, "u": lab(other), "v": lab(u)})
    return HomogReport(m, n_max, True)


# ---------------------------------------------------------------- ages


def embeds(c: RelStruct, a: RelStruct) -> bool:
    """Whether ``c`` is isomorphic to an induced substructure of ``a``."""
    if c.size > a.size:
        return False
    if dict(c.signature) != {n: ar for n, ar in a.signature if n in dict(c.signature)}:
        raise SignatureClash("signatures differ")
    return next(embeddings(c, a), None) is not None


def embeddings(c: RelStruct, a: RelStruct):
    """Injective maps ``c -> a`` preserving and reflecting the relations of ``c``."""
    checks = _relation_checks(c)
    n = c.size
    img = [-1] * n
    used = [False] * a.size

    def ok(x):
        for name, t, inside in checks[x]:
            if (tuple(img[y] for y in t) in a.relations[name]) != inside:
                return False
        return True

    def rec(x):
        if x == n:
            yield list(img)
            return
        for y in range(a.size):
            if not used[y]:
                img[x], used[y] = y, True
                if ok(x):
                    yield from rec(x + 1)
                used[y] = False
        img[x] = -1

    yield from rec(0)


def canonical_form(c: RelStruct) -> tuple:
    """Least relation encoding over all relabellings; invariant under isomorphism."""
    if c.size > 7:
        raise CapExceeded(7, "points for canonical forms")
    inv = _point_invariants(c)
    groups: dict = {}
    for x in range(c.size):
        groups.setdefault(inv[x], []).append(x)
    keys = sorted(groups)
    best = None
    for parts in itertools.product(*(itertools.permutations(groups[k]) for k in keys)):
        order = [x for p in parts for x in p]
        pos = {x: i for i, x in enumerate(order)}
        code = tuple(tuple(sorted(tuple(pos[x] for x in t) for t in c.relations[n]))
                     for n, _ in c.signature)
        if best is None or code < best:
            best = code
    return (c.size, tuple(keys), best)


def _extensions(c: RelStruct):
    """All structures obtained by adding one point to ``c``."""
    n = c.size
    new_tuples = []
    for name, arity in c.signature:
        for t in itertools.product(range(n + 1), repeat=arity):
            if n in t:
                new_tuples.append((name, t))
    for bits in itertools.product((False, True), repeat=len(new_tuples)):
        rels = {name: set(ts) for name, ts in c.relations.items()}
        for on, (name, t) in zip(bits, new_tuples):
            if on:
                rels[name].add(t)
        yield RelStruct([str(i) for i in range(n + 1)], c.signature, rels)


def _relabel(c: RelStruct) -> RelStruct:
    return RelStruct([str(i) for i in range(c.size)], c.signature, c.relations)


@dataclass
class BoundsReport:
    horizon: int
    obstructions: list
    bound: int
    complete: bool

    def to_json(self) -> dict:
        return {"horizon": self.horizon, "bound": self.bound, "complete": self.complete,
                "obstructions": [o.to_json() for o in self.obstructions]}


def _scan(signature, s: int, member):
    """Minimal non-members up to size ``s``; uses a local record of member keys."""
    empty = RelStruct([], signature, {})
    members = {canonical_form(empty): empty}
    obstructions, levels = [], []
    for k in range(1, s + 1):
        cands = {}
        for c in members.values():
            for d in _extensions(c):
                key = canonical_form(d)
                if key in cands:
                    continue
                subs_ok = all(canonical_form(_relabel(d.induced([y for y in range(k) if y != x])))
                              in members for x in range(k))
                if subs_ok:
                    cands[key] = d
        nxt = {}
        for key in sorted(cands):
            d = cands[key]
            ok = member(d)
            levels.append((k, d, ok))
            if ok:
                nxt[key] = d
            else:
                obstructions.append(d)
        members = nxt
        if not members:
            break
    return obstructions, levels


def boundedness_scan(a: RelStruct, s: int) -> BoundsReport:
    """Minimal structures outside the age of ``a`` with at most ``s`` points."""
    obstructions, _ = _scan(a.signature, s, lambda d: embeds(d, a))
    bound = max([a.max_arity()] + [o.size for o in obstructions])
    return BoundsReport(s, obstructions, bound, s >= a.size + 1)


def forb_check(a: RelStruct, forbidden, s: int) -> dict:
    """Compare age membership with avoiding every structure in ``forbidden``."""
    def avoid(d):
        return not any(embeds(f, d) for f in forbidden)

    _, levels = _scan(a.signature, s, avoid)
    for k, d, ok in levels:
        if embeds(d, a) != ok:
            return {"agrees": False, "size": k, "witness": d.to_json(),
                    "in_age": not ok}
    return {"agrees": True, "size": None, "witness": None}


# ---------------------------------------------------------------- merging expansions


def merge_expansions_check(b: RelStruct, a: RelStruct, c: RelStruct, marked, horizon: int | None = None) -> dict:
    """Age membership of ``c`` in the reduct ``b`` of ``a``, computed directly and
    by merging expansions of ``c`` minus each marked point."""
    if any(n not in dict(a.signature) for n, _ in b.signature):
        raise SignatureClash("reduct signature is not contained in the expansion's")
    horizon = a.size + 1 if horizon is None else horizon
    rep = boundedness_scan(a, horizon)
    if not rep.complete:
        raise HorizonTooSmall(f"scan horizon {horizon} may miss obstructions of size {a.size + 1}")
    m = rep.bound
    marked = [c.domain.index(parse_label(x)) for x in marked]
    degenerate = c.size <= m
    if degenerate:
        if sorted(marked) != list(range(c.size)):
            raise ValueError("with at most bound many points every point must be marked")
    elif len(set(marked)) != m + 1:
        raise ValueError(f"need exactly {m + 1} distinct marked points")
    direct = embeds(c, b)
    # expansions of c minus a_i lying in the age of a are pullbacks of a along
    # embeddings into b
    options = []
    for ai in marked:
        pts = [x for x in range(c.size) if x != ai]
        sub = c.induced(pts)
        exps = set()
        for emb in embeddings(sub, b):
            rel = {}
            for name, arity in a.signature:
                inv = {y: pts[x] for x, y in enumerate(emb)}
                rel[name] = frozenset(tuple(inv[y] for y in t) for t in a.relations[name]
                                      if all(y in inv for y in t))
            exps.add(tuple(sorted(rel.items())))
        options.append((set(pts), sorted(exps)))

    def restrict(exp, keep):
        return tuple((n, frozenset(t for t in ts if all(x in keep for x in t))) for n, ts in exp)

    def search(i, chosen):
        if i == len(options):
            return True
        pts_i, exps = options[i]
        for e in exps:
            if all(restrict(e, pts_i & options[j][0]) == restrict(chosen[j], pts_i & options[j][0])
                   for j in range(i)):
                if search(i + 1, chosen + [e]):
                    return True
        return False

    merged = search(0, [])
    return {"direct": direct, "merged": merged, "agrees": direct == merged,
            "bound": m, "degenerate": degenerate}
