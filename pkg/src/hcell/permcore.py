"""Finite permutation groups on labelled domains.

Points are labelled by paths of tags.  A group stores its domain in sorted
label order and its generators as image tuples over that order; the full
element set is computed lazily by breadth-first closure and cached.
"""

from __future__ import annotations

import json
import re
from collections import deque
from typing import Iterable, NamedTuple, Sequence

DEFAULT_ELEM_CAP = 10**6


class CapExceeded(RuntimeError):
    def __init__(self, cap: int, what: str = "group elements"):
        super().__init__(f"more than {cap} {what}")
        self.cap = cap


class NotACongruence(ValueError):
    pass


# ---------------------------------------------------------------- labels

BLOCK, BASE, COPY = 0, 1, 2


class Tag(NamedTuple):
    kind: int
    num: int
    name: str

    def __str__(self) -> str:
        if self.kind == BLOCK:
            return f"B{self.num}"
        if self.kind == COPY:
            return f"c{self.num}"
        return self.name


def base(name: str) -> Tag:
    if not name or "/" in name:
        raise ValueError(f"bad base name {name!r}")
    return Tag(BASE, int(name) if name.isdigit() else -1, name)


def copy_tag(i: int) -> Tag:
    return Tag(COPY, i, "")


def block_tag(i: int) -> Tag:
    return Tag(BLOCK, i, "")


Label = tuple  # tuple[Tag, ...]

_BLOCK_RE = re.compile(r"B(\d+)$")
_COPY_RE = re.compile(r"c(\d+)$")


def parse_label(text) -> Label:
    if isinstance(text, tuple):
        return text
    tags = []
    for part in str(text).split("/"):
        if m := _BLOCK_RE.match(part):
            tags.append(block_tag(int(m.group(1))))
        elif m := _COPY_RE.match(part):
            tags.append(copy_tag(int(m.group(1))))
        else:
            tags.append(base(part))
    return tuple(tags)


def label_str(label: Label) -> str:
    return "/".join(str(t) for t in label)


def prefixed(tag: Tag, label: Label) -> Label:
    return (tag,) + tuple(label)


# ---------------------------------------------------------------- perms


class Perm(tuple):
    """Image tuple: ``p[i]`` is the image of point ``i``.

    ``p * q`` is composition ``p o q`` (apply ``q`` first).
    """

    __slots__ = ()

    def __mul__(self, other):
        return Perm(self[i] for i in other)

    def __rmul__(self, other):
        return NotImplemented

    def inverse(self) -> "Perm":
        inv = [0] * len(self)
        for i, j in enumerate(self):
            inv[j] = i
        return Perm(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self)):
            if i in seen or self[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self[j]
            out.append(tuple(cyc))
        return out

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(range(n))


def compose(p, q) -> tuple:
    """``p o q`` on plain tuples."""
    return tuple(p[i] for i in q)


def inverse(p) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _check_perm(p, n: int) -> Perm:
    p = Perm(p)
    if len(p) != n or sorted(p) != list(range(n)):
        raise ValueError(f"not a permutation of {n} points: {list(p)}")
    return p


# ---------------------------------------------------------------- groups


class FinPermGroup:
    """A permutation group given by generators on a sorted label domain."""

    def __init__(self, domain: Sequence, gens: Iterable = (), elem_cap: int = DEFAULT_ELEM_CAP):
        labels = [parse_label(x) for x in domain]
        order = sorted(range(len(labels)), key=lambda i: labels[i])
        self.domain: tuple = tuple(labels[i] for i in order)
        if len(set(self.domain)) != len(self.domain):
            raise ValueError("duplicate labels in domain")
        n = len(self.domain)
        # gens are given against the input order; remap to sorted order
        pos = {old: new for new, old in enumerate(order)}
        out = []
        for g in gens:
            g = _check_perm(g, n)
            out.append(Perm(pos[g[order[i]]] for i in range(n)))
        self.gens: tuple = tuple(out)
        self.elem_cap = elem_cap
        self._elements: frozenset | None = None
        self._index = {lab: i for i, lab in enumerate(self.domain)}

    @classmethod
    def from_elements(cls, domain, elements, elem_cap: int = DEFAULT_ELEM_CAP) -> "FinPermGroup":
        """Group whose generators are a known closed element set over a sorted domain."""
        g = cls.__new__(cls)
        g.domain = tuple(domain)
        g._index = {lab: i for i, lab in enumerate(g.domain)}
        elems = frozenset(Perm(e) for e in elements)
        if not elems:
            elems = frozenset([Perm.identity(len(g.domain))])
        g.gens = tuple(sorted(e for e in elems if not e.is_identity()))
        g.elem_cap = elem_cap
        g._elements = elems
        return g

    @classmethod
    def on_sorted(cls, domain, gens, elem_cap: int = DEFAULT_ELEM_CAP) -> "FinPermGroup":
        """Fast constructor when ``domain`` is already sorted and gens are valid."""
        g = cls.__new__(cls)
        g.domain = tuple(domain)
        g._index = {lab: i for i, lab in enumerate(g.domain)}
        g.gens = tuple(Perm(x) for x in gens)
        g.elem_cap = elem_cap
        g._elements = None
        return g

    # -- basics
    @property
    def degree(self) -> int:
        return len(self.domain)

    def index_of(self, label) -> int:
        return self._index[parse_label(label)]

    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def elements(self) -> frozenset:
        if self._elements is None:
            self._elements = frozenset(generate_elements(self, self.elem_cap))
        return self._elements

    def order(self) -> int:
        return len(self.elements())

    def __contains__(self, p) -> bool:
        return tuple(p) in self.elements()

    def __eq__(self, other) -> bool:
        # equal as permutation groups: same domain, same element set
        if not isinstance(other, FinPermGroup):
            return NotImplemented
        if self.domain != other.domain:
            return False
        return self.gens == other.gens or self.elements() == other.elements()

    def __hash__(self) -> int:
        return hash(self.domain)

    def __repr__(self) -> str:
        return f"FinPermGroup(degree={self.degree}, gens={len(self.gens)})"

    def orbits(self) -> list[tuple[int, ...]]:
        return orbits_of(self.degree, self.gens)

    def perm_from_map(self, mapping: dict) -> Perm:
        img = list(range(self.degree))
        for a, b in mapping.items():
            img[self.index_of(a)] = self.index_of(b)
        return _check_perm(img, self.degree)

    def perm_from_cycles(self, cycles) -> Perm:
        img = list(range(self.degree))
        for cyc in cycles:
            idx = [self.index_of(x) for x in cyc]
            for a, b in zip(idx, idx[1:] + idx[:1]):
                img[a] = b
        return _check_perm(img, self.degree)

    # -- serialisation
    def to_json(self) -> dict:
        return {"domain": [label_str(x) for x in self.domain],
                "gens": [list(g) for g in self.gens]}

    @classmethod
    def from_json(cls, data, elem_cap: int = DEFAULT_ELEM_CAP) -> "FinPermGroup":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["domain"], data.get("gens", []), elem_cap=elem_cap)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def orbits_of(n: int, gens) -> list[tuple[int, ...]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(v) for v in groups.values())


def generate_elements(g: FinPermGroup, elem_cap: int = DEFAULT_ELEM_CAP) -> set:
    """All elements of ``<gens>`` by breadth-first closure."""
    ident = g.identity()
    seen = {ident}
    queue = deque([ident])
    gens = [tuple(x) for x in g.gens]
    while queue:
        p = queue.popleft()
        for s in gens:
            q = Perm(s[i] for i in p)
            if q not in seen:
                seen.add(q)
                if len(seen) > elem_cap:
                    raise CapExceeded(elem_cap)
                queue.append(q)
    return seen


def closure_of(domain, gens, elem_cap: int = DEFAULT_ELEM_CAP) -> FinPermGroup:
    g = FinPermGroup.on_sorted(domain, gens, elem_cap)
    g.elements()
    return g


# ---------------------------------------------------------------- constructors


def sym(labels, elem_cap: int = DEFAULT_ELEM_CAP) -> FinPermGroup:
    g = FinPermGroup(labels, [], elem_cap)
    n = g.degree
    gens = []
    if n >= 2:
        gens.append(Perm([1, 0] + list(range(2, n))))
    if n >= 3:
        gens.append(Perm(list(range(1, n)) + [0]))
    return FinPermGroup.on_sorted(g.domain, gens, elem_cap)


def trivial(labels) -> FinPermGroup:
    return FinPermGroup(labels, [])


def from_cycles(labels, gens_cycles) -> FinPermGroup:
    """Group on ``labels`` generated by permutations given as lists of cycles."""
    g = FinPermGroup(labels, [])
    return FinPermGroup.on_sorted(g.domain, [g.perm_from_cycles(c) for c in gens_cycles])


# ---------------------------------------------------------------- relations


def subgroup_relation(h: FinPermGroup, g: FinPermGroup) -> dict:
    """Containment, normality and index of ``h`` in ``g``."""
    if h.domain != g.domain:
        return {"subgroup": False, "normal": False, "index": None}
    ge = g.elements()
    sub = all(x in ge for x in h.gens)
    if not sub:
        return {"subgroup": False, "normal": False, "index": None}
    he = h.elements()
    normal = all(Perm(compose(compose(s, x), inverse(s))) in he for s in g.gens for x in h.gens)
    return {"subgroup": True, "normal": normal, "index": len(ge) // len(he)}


def _indices(g: FinPermGroup, labels) -> list[int]:
    return sorted(g.index_of(x) for x in labels)


def stabilizer(g: FinPermGroup, points, mode: str = "pointwise") -> FinPermGroup:
    idx = _indices(g, points)
    if mode == "pointwise":
        keep = [p for p in g.elements() if all(p[i] == i for i in idx)]
    elif mode == "setwise":
        s = set(idx)
        keep = [p for p in g.elements() if all(p[i] in s for i in idx)]
    else:
        raise ValueError(f"unknown stabilizer mode {mode!r}")
    return FinPermGroup.from_elements(g.domain, keep, g.elem_cap)


def restrict_to(g: FinPermGroup, elems, labels) -> FinPermGroup:
    """Restrict permutations that fix ``labels`` setwise to those labels."""
    idx = _indices(g, labels)
    local = {j: k for k, j in enumerate(idx)}
    dom = tuple(g.domain[i] for i in idx)
    out = {Perm(local[p[i]] for i in idx) for p in elems}
    return FinPermGroup.from_elements(dom, out, g.elem_cap)


def restrict_inner(g: FinPermGroup, labels, mode: str = "(Y)") -> FinPermGroup:
    """``(Y)``: setwise stabiliser restricted to Y.
    ``((Y))``: pointwise stabiliser of the complement, restricted to Y."""
    y = set(_indices(g, labels))
    if mode == "(Y)":
        elems = [p for p in g.elements() if all(p[i] in y for i in y)]
    elif mode == "((Y))":
        rest = [i for i in range(g.degree) if i not in y]
        elems = [p for p in g.elements() if all(p[i] == i for i in rest)]
    else:
        raise ValueError(f"unknown restriction mode {mode!r}")
    return restrict_to(g, elems, [g.domain[i] for i in y])


# ---------------------------------------------------------------- partitions


def canonical_partition(blocks) -> tuple:
    return tuple(sorted(tuple(sorted(b)) for b in blocks if b))


def partition_classes(n: int, blocks) -> list[int]:
    cls = [-1] * n
    for k, b in enumerate(blocks):
        for i in b:
            cls[i] = k
    if -1 in cls:
        raise NotACongruence("partition does not cover the domain")
    return cls


def is_invariant_partition(gens, blocks, n: int) -> bool:
    cls = partition_classes(n, blocks)
    for g in gens:
        for b in blocks:
            c = cls[g[b[0]]]
            if any(cls[g[x]] != c for x in b):
                return False
    return True


def quotient_by_congruence(g: FinPermGroup, blocks) -> FinPermGroup:
    """Action on the classes of an invariant partition (given as label lists or index lists)."""
    blocks = [sorted(x if isinstance(x, int) else g.index_of(x) for x in b) for b in blocks]
    blocks = list(canonical_partition(blocks))
    n = g.degree
    if not is_invariant_partition(g.gens, blocks, n):
        raise NotACongruence("partition is not preserved by the group")
    cls = partition_classes(n, blocks)
    names = [g.domain[b[0]] for b in blocks]
    order = sorted(range(len(blocks)), key=lambda k: names[k])
    pos = {k: r for r, k in enumerate(order)}
    gens = []
    for p in g.gens:
        gens.append(Perm(pos[cls[p[blocks[order[r]][0]]]] for r in range(len(blocks))))
    return FinPermGroup.on_sorted([names[k] for k in order], gens, g.elem_cap)


# ---------------------------------------------------------------- products


def direct_product(parts: Sequence[FinPermGroup]) -> FinPermGroup:
    dom, offsets = [], []
    for j, part in enumerate(parts):
        offsets.append(len(dom))
        dom.extend(prefixed(block_tag(j), x) for x in part.domain)
    n = len(dom)
    gens = []
    for j, part in enumerate(parts):
        off = offsets[j]
        for s in part.gens:
            img = list(range(n))
            for i, x in enumerate(s):
                img[off + i] = off + x
            gens.append(img)
    # block tags sort by block index, so dom is already sorted
    cap = max([p.elem_cap for p in parts], default=DEFAULT_ELEM_CAP)
    return FinPermGroup.on_sorted(dom, gens, cap)


def wreath_finite(g: FinPermGroup, m: int) -> FinPermGroup:
    """``g`` wreath ``Sym(m)`` acting on ``m`` copy-tagged copies of the domain."""
    d = g.degree
    dom = [prefixed(copy_tag(c), x) for c in range(m) for x in g.domain]
    n = len(dom)
    gens = []
    for s in g.gens:
        img = list(range(n))
        for i, x in enumerate(s):
            img[i] = x
        gens.append(img)
    for c in range(1, m):
        img = list(range(n))
        for i in range(d):
            img[i], img[c * d + i] = c * d + i, i
        gens.append(img)
    return FinPermGroup.on_sorted(dom, gens, g.elem_cap)
