"""Finite truncations of group expressions and the block/copy calculus.

A truncation replaces every countable copy index set by ``{0..t-1}``.  Each
truncated point is recorded as ``(block, copy, base label)``; block 0 holds the
points fixed setwise by construction (one copy only).  From this record we get
the coarse partition (one class per block) and the fine one (one class per
block copy), and every block-respecting permutation splits into a block map,
per-block copy maps and one base permutation per copy vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

from .expr import Cons, DirectProduct, Finite, WreathOmega, base_domain, cons_normal_core
from .permcore import (
    FinPermGroup,
    Perm,
    block_tag,
    compose,
    copy_tag,
    direct_product,
    inverse,
    prefixed,
    restrict_inner,
    wreath_finite,
)


class NotBlockRespecting(ValueError):
    pass


class NotNormalizing(ValueError):
    pass


@dataclass
class TruncationMeta:
    t: int
    copy_of: tuple  # point index -> (block, copy, base label)
    domain: tuple  # truncated point labels
    k: int = 0
    base: tuple = ()
    blocks: tuple = ()  # block i -> tuple of base labels
    y0: tuple = ()  # point indices of block 0
    nabla: tuple = ()
    delta: tuple = ()
    point_of: dict = field(default_factory=dict)
    block_of: dict = field(default_factory=dict)
    base_pos: dict = field(default_factory=dict)

    @classmethod
    def build(cls, t: int, domain, copy_of) -> "TruncationMeta":
        copy_of = tuple(copy_of)
        k = max((c[0] for c in copy_of), default=0)
        base = tuple(sorted({c[2] for c in copy_of}))
        blocks = [[] for _ in range(k + 1)]
        block_of = {}
        for i, _, a in copy_of:
            if a not in block_of:
                block_of[a] = i
                blocks[i].append(a)
        blocks = tuple(tuple(sorted(b)) for b in blocks)
        point_of = {(n, a): p for p, (_, n, a) in enumerate(copy_of)}
        y0 = tuple(p for p, c in enumerate(copy_of) if c[0] == 0)
        nab, dl = {}, {}
        for p, (i, n, _) in enumerate(copy_of):
            nab.setdefault(i, []).append(p)
            dl.setdefault((i, n), []).append(p)
        nabla = tuple(tuple(nab[i]) for i in sorted(nab))
        delta = tuple(tuple(dl[key]) for key in sorted(dl))
        return cls(t=t, copy_of=copy_of, domain=tuple(domain), k=k, base=base,
                   blocks=blocks, y0=y0, nabla=nabla, delta=delta, point_of=point_of,
                   block_of=block_of, base_pos={a: i for i, a in enumerate(base)})

    def vectors(self):
        return itertools.product(range(self.t), repeat=self.k)

    def omega_candidate(self) -> tuple:
        """``(K, coarse, fine)`` with the partitions restricted off ``K``."""
        k_set = tuple(self.y0)
        nab = tuple(c for c in self.nabla if self.copy_of[c[0]][0] != 0)
        dl = tuple(c for c in self.delta if self.copy_of[c[0]][0] != 0)
        return k_set, nab, dl

    def to_json(self) -> dict:
        from .permcore import label_str

        lab = lambda ps: [label_str(self.domain[p]) for p in ps]  # noqa: E731
        return {"t": self.t, "k": self.k,
                "y0": lab(self.y0),
                "nabla": [lab(c) for c in self.nabla],
                "delta": [lab(c) for c in self.delta],
                "copy_of": {label_str(self.domain[p]): [i, n, label_str(a)]
                            for p, (i, n, a) in enumerate(self.copy_of)}}


# ---------------------------------------------------------------- truncation


def truncate(e, t: int) -> tuple[FinPermGroup, TruncationMeta]:
    if t < 1:
        raise ValueError("truncation size must be at least 1")
    if isinstance(e, Finite):
        g = e.group
        meta = TruncationMeta.build(t, g.domain, [(0, 0, x) for x in g.domain])
        return g, meta
    if isinstance(e, WreathOmega):
        inner, _ = truncate(e.inner, t)
        g = wreath_finite(inner, t)
        d = inner.degree
        copy_of = [(1, p // d, inner.domain[p % d]) for p in range(g.degree)]
        return g, TruncationMeta.build(t, g.domain, copy_of)
    if isinstance(e, DirectProduct):
        groups, copy_of, offset = [], [], 0
        for j, part in enumerate(e.parts):
            g, m = truncate(part, t)
            groups.append(g)
            for i, n, a in m.copy_of:
                copy_of.append((0 if i == 0 else offset + i, n, prefixed(block_tag(j), a)))
            offset += m.k
        g = direct_product(groups)
        return g, TruncationMeta.build(t, g.domain, copy_of)
    if isinstance(e, Cons):
        return _truncate_cons(e, t)
    raise TypeError(f"not a group expression: {e!r}")


def _truncate_cons(e: Cons, t: int):
    entries = [(prefixed(copy_tag(0), a), (0, 0, a)) for a in e.y0]
    for i, part in enumerate(e.parts, start=1):
        for n in range(t):
            entries.extend((prefixed(copy_tag(n), a), (i, n, a)) for a in part.domain)
    entries.sort()
    domain = [x for x, _ in entries]
    meta = TruncationMeta.build(t, domain, [c for _, c in entries])
    size = len(domain)
    pt = meta.point_of
    gens = []
    for i, part in enumerate(e.parts, start=1):
        for c in range(1, t):
            img = list(range(size))
            for a in part.domain:
                img[pt[0, a]], img[pt[c, a]] = pt[c, a], pt[0, a]
            gens.append(Perm(img))
        for s in part.gens:
            img = list(range(size))
            for x, y in enumerate(s):
                img[pt[0, part.domain[x]]] = pt[0, part.domain[y]]
            gens.append(Perm(img))
    for s in e.h.gens:
        gens.append(diagonal_lift(s, meta))
    return FinPermGroup.on_sorted(domain, gens, e.h.elem_cap), meta


def diagonal_lift(tau, meta: TruncationMeta) -> Perm:
    """The permutation acting as ``tau`` on every copy and keeping copy indices."""
    for ys in meta.blocks:
        if len({meta.block_of[meta.base[tau[meta.base_pos[a]]]] for a in ys}) > 1:
            raise NotNormalizing("base permutation does not map blocks onto blocks")
    img = [0] * len(meta.copy_of)
    for p, (i, n, a) in enumerate(meta.copy_of):
        img[p] = meta.point_of[n, meta.base[tau[meta.base_pos[a]]]]
    return Perm(img)


# ---------------------------------------------------------------- decomposition


@dataclass
class Decomposition:
    phi: tuple  # block map, phi[0] == 0
    psi: tuple  # psi[i][n]: copy map of block i
    rho: dict  # copy vector -> Perm on the base set

    def move_vector(self, vec) -> tuple:
        """Image of a copy vector under the induced action on fine classes."""
        out = [0] * len(vec)
        for i, n in enumerate(vec, start=1):
            out[self.phi[i] - 1] = self.psi[i][n]
        return tuple(out)


def class_map(sigma, classes, copy_of) -> dict | None:
    """Map of classes induced by ``sigma`` or None if some class is split."""
    where = {}
    for idx, c in enumerate(classes):
        for p in c:
            where[p] = idx
    out = {}
    for idx, c in enumerate(classes):
        targets = {where[sigma[p]] for p in c}
        if len(targets) != 1:
            return None
        (j,) = targets
        if len(classes[j]) != len(c):
            return None
        out[idx] = j
    return out


def rho_at(sigma, meta: TruncationMeta, vec) -> Perm:
    img = [0] * len(meta.base)
    copy_of, pt, bpos = meta.copy_of, meta.point_of, meta.base_pos
    for a, pos in bpos.items():
        i = meta.block_of[a]
        n = 0 if i == 0 else vec[i - 1]
        img[pos] = bpos[copy_of[sigma[pt[n, a]]][2]]
    return Perm(img)


def decompose(sigma, meta: TruncationMeta, vectors=None) -> Decomposition:
    copy_of, pt = meta.copy_of, meta.point_of
    y0 = set(meta.y0)
    if any(sigma[p] not in y0 for p in y0):
        raise NotBlockRespecting("fixed part not preserved")
    phi = [0] * (meta.k + 1)
    psi = [(0,)] + [None] * meta.k
    for i in range(1, meta.k + 1):
        ys = meta.blocks[i]
        row = []
        for n in range(meta.t):
            targets = {copy_of[sigma[pt[n, a]]][:2] for a in ys}
            if len(targets) != 1:
                raise NotBlockRespecting(f"copy {n} of block {i} is split")
            (j, m), = targets
            if j == 0 or len(meta.blocks[j]) != len(ys):
                raise NotBlockRespecting(f"copy {n} of block {i} leaves the blocks")
            if n == 0:
                phi[i] = j
            elif phi[i] != j:
                raise NotBlockRespecting(f"block {i} is split across blocks")
            row.append(m)
        psi[i] = tuple(row)
    vecs = meta.vectors() if vectors is None else vectors
    rho = {tuple(v): rho_at(sigma, meta, v) for v in vecs}
    return Decomposition(tuple(phi), tuple(psi), rho)


def reassemble(dec: Decomposition, meta: TruncationMeta) -> Perm:
    img = [0] * len(meta.copy_of)
    for p, (i, n, a) in enumerate(meta.copy_of):
        rho = dec.rho[(n,) * meta.k]
        b = meta.base[rho[meta.base_pos[a]]]
        img[p] = meta.point_of[dec.psi[i][n] if i else 0, b]
    return Perm(img)


def check_rho_identities(d_sigma, d_tau, d_prod, d_sinv, vec) -> dict:
    """Product and inverse rules for copy-vector restrictions.

    ``d_prod`` decomposes ``tau o sigma`` and ``d_sinv`` decomposes ``sigma^-1``.
    """
    vec = tuple(vec)
    lhs = d_prod.rho[vec]
    rhs = Perm(compose(d_tau.rho[d_sigma.move_vector(vec)], d_sigma.rho[vec]))
    inv_lhs = d_sinv.rho[vec]
    inv_rhs = Perm(inverse(d_sigma.rho[d_sinv.move_vector(vec)]))
    return {"product": lhs == rhs, "inverse": inv_lhs == inv_rhs}


def rho_compose_check(sigma, tau, meta: TruncationMeta, vec) -> bool:
    res = check_rho_identities(
        decompose(sigma, meta), decompose(tau, meta),
        decompose(compose(tau, sigma), meta), decompose(inverse(sigma), meta), vec)
    return res["product"] and res["inverse"]


# ---------------------------------------------------------------- membership


@dataclass
class ConsContext:
    meta: TruncationMeta
    h: frozenset
    n: frozenset

    @classmethod
    def of(cls, e: Cons, meta: TruncationMeta) -> "ConsContext":
        return cls(meta, e.h.elements(), cons_normal_core(e).elements())


@dataclass
class MembershipVerdict:
    a: bool
    b: bool | None
    c: bool | None
    d: bool | None
    failure: str | None = None

    @property
    def member(self) -> bool:
        return bool(self.a and self.b and self.c and self.d)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d,
                "member": self.member, "failure": self.failure}


def membership_abcd(sigma, e: Cons, meta: TruncationMeta, ctx: ConsContext | None = None) -> MembershipVerdict:
    ctx = ctx or ConsContext.of(e, meta)
    y0 = set(meta.y0)
    a_ok = all(sigma[p] in y0 for p in y0)
    b_ok = (class_map(sigma, meta.nabla, meta.copy_of) is not None
            and class_map(sigma, meta.delta, meta.copy_of) is not None)
    if not a_ok:
        return MembershipVerdict(False, b_ok, None, None, "(a) fixed part not preserved")
    if not b_ok:
        return MembershipVerdict(True, False, None, None, "(b) partitions not preserved")
    first = None
    for v in meta.vectors():
        r = rho_at(sigma, meta, v)
        if r not in ctx.h:
            return MembershipVerdict(True, True, False, None, f"(c) copy vector {list(v)}")
        if first is None:
            first_inv = inverse(r)
            first = r
        elif Perm(compose(first_inv, r)) not in ctx.n:
            return MembershipVerdict(True, True, True, False, f"(d) copy vector {list(v)}")
    return MembershipVerdict(True, True, True, True)


def block_respecting_perms(meta: TruncationMeta):
    """Every permutation preserving the fixed part and both partitions."""
    k, t = meta.k, meta.t
    pt = meta.point_of
    y0_labels = meta.blocks[0]
    sizes = [len(b) for b in meta.blocks]
    phis = [p for p in itertools.permutations(range(1, k + 1))
            if all(sizes[i + 1] == sizes[p[i]] for i in range(k))]
    copy_maps = list(itertools.permutations(range(t)))
    size = len(meta.copy_of)
    for y0_img in itertools.permutations(y0_labels):
        base_img = [0] * size
        for a, b in zip(y0_labels, y0_img):
            base_img[pt[0, a]] = pt[0, b]
        for phi in phis:
            per_block = []
            for i in range(1, k + 1):
                src, dst = meta.blocks[i], meta.blocks[phi[i - 1]]
                bij = list(itertools.permutations(dst))
                per_block.append(list(itertools.product(copy_maps, itertools.product(bij, repeat=t))))
            for choice in itertools.product(*per_block):
                img = list(base_img)
                for i, (psi, bijs) in enumerate(choice, start=1):
                    src = meta.blocks[i]
                    for n in range(t):
                        m = psi[n]
                        for a, b in zip(src, bijs[n]):
                            img[pt[n, a]] = pt[m, b]
                yield Perm(img)


def block_respecting_count(meta: TruncationMeta) -> int:
    sizes = [len(b) for b in meta.blocks]
    phis = sum(1 for p in itertools.permutations(range(1, meta.k + 1))
               if all(sizes[i + 1] == sizes[p[i]] for i in range(meta.k)))
    per = 1
    for s in sizes[1:]:
        per *= factorial(meta.t) * factorial(s) ** meta.t
    return factorial(sizes[0]) * phis * per


def cons_oracle_elements(e: Cons, t: int) -> set:
    """Truncated group computed from the membership conditions alone."""
    _, meta = truncate(e, t)
    ctx = ConsContext.of(e, meta)
    return {s for s in block_respecting_perms(meta) if membership_abcd(s, e, meta, ctx).member}


def normal_only(e: Cons) -> Cons:
    """Same expression with ``h`` replaced by the product of parts."""
    return Cons(e.y0, e.parts, cons_normal_core(e))


# ---------------------------------------------------------------- recovery


def recovered_normal_part(g: FinPermGroup, meta: TruncationMeta) -> FinPermGroup:
    """Product over blocks of the pointwise stabiliser of everything outside
    copy 0 of that block, read on the base set."""
    gens = []
    nb = len(meta.base)
    for i in range(1, meta.k + 1):
        copy0 = [meta.domain[meta.point_of[0, a]] for a in meta.blocks[i]]
        local = restrict_inner(g, copy0, "((Y))")
        # local.domain is sorted copy-0 labels; map back to base labels
        labels = [meta.copy_of[g.index_of(x)][2] for x in local.domain]
        for s in local.gens:
            img = list(range(nb))
            for x, y in enumerate(s):
                img[meta.base_pos[labels[x]]] = meta.base_pos[labels[y]]
            gens.append(Perm(img))
    return FinPermGroup.on_sorted(meta.base, gens, g.elem_cap)


def recover_base(g: FinPermGroup, meta: TruncationMeta) -> FinPermGroup:
    zero = (0,) * meta.k
    found = {rho_at(s, meta, zero) for s in g.elements()}
    h = FinPermGroup.on_sorted(meta.base, sorted(found), g.elem_cap)
    n = recovered_normal_part(g, meta)
    he, ne = h.elements(), n.elements()
    if not ne <= he:
        raise NotNormalizing("recovered base does not contain the normal part")
    if any(Perm(compose(compose(s, x), inverse(s))) not in ne for s in h.gens for x in n.gens):
        raise NotNormalizing("recovered base does not normalise the normal part")
    return FinPermGroup.from_elements(meta.base, he, g.elem_cap)


def diagonal_extend(g: FinPermGroup, meta: TruncationMeta, tau) -> FinPermGroup:
    """Adjoin the diagonal copy of a base permutation normalising the normal part."""
    tau = Perm(tau)
    y0 = {meta.base_pos[a] for a in meta.blocks[0]}
    if any(tau[i] not in y0 for i in y0):
        raise NotNormalizing("base permutation moves the fixed part")
    n = recovered_normal_part(g, meta)
    ne = n.elements()
    if any(Perm(compose(compose(tau, x), inverse(tau))) not in ne for x in n.gens):
        raise NotNormalizing("base permutation does not normalise the normal part")
    lifted = diagonal_lift(tau, meta)
    out = FinPermGroup.on_sorted(g.domain, list(g.gens) + [lifted], g.elem_cap)
    out.elements()
    return out
