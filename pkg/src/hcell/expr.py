"""Group expressions: finite groups, products, countable wreaths and the
block construction ``Cons(y0, parts, h)``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .permcore import (
    FinPermGroup,
    Perm,
    block_tag,
    parse_label,
    prefixed,
    subgroup_relation,
)


@dataclass(frozen=True)
class Finite:
    group: FinPermGroup


@dataclass(frozen=True)
class DirectProduct:
    parts: tuple


@dataclass(frozen=True)
class WreathOmega:
    inner: "GroupExpr"


@dataclass(frozen=True)
class Cons:
    """``y0`` is fixed setwise by ``h``; each part acts on one block of the
    base set; ``h`` acts on the union and must normalise the product of parts."""

    y0: tuple
    parts: tuple
    h: FinPermGroup

    def __post_init__(self):
        object.__setattr__(self, "y0", tuple(sorted(parse_label(x) for x in self.y0)))
        object.__setattr__(self, "parts", tuple(self.parts))


GroupExpr = Union[Finite, DirectProduct, WreathOmega, Cons]


def dp(*parts) -> DirectProduct:
    return DirectProduct(tuple(parts))


def wr(inner, times: int = 1):
    for _ in range(times):
        inner = WreathOmega(inner)
    return inner


def base_domain(e) -> list:
    if isinstance(e, Finite):
        return list(e.group.domain)
    if isinstance(e, DirectProduct):
        return [prefixed(block_tag(j), x) for j, p in enumerate(e.parts) for x in base_domain(p)]
    if isinstance(e, WreathOmega):
        return base_domain(e.inner)
    if isinstance(e, Cons):
        return sorted(set(e.y0).union(*(p.domain for p in e.parts)))
    raise TypeError(f"not a group expression: {e!r}")


def rank_upper(e) -> int:
    if isinstance(e, Finite):
        return 0
    if isinstance(e, DirectProduct):
        return max((rank_upper(p) for p in e.parts), default=0)
    if isinstance(e, WreathOmega):
        return 1 + rank_upper(e.inner)
    if isinstance(e, Cons):
        return 1
    raise TypeError(f"not a group expression: {e!r}")


def cons_normal_core(e: Cons) -> FinPermGroup:
    """The product ``id(y0) x N_1 x ... x N_k`` as a group on the base set."""
    dom = base_domain(e)
    pos = {x: i for i, x in enumerate(dom)}
    gens = []
    for part in e.parts:
        for s in part.gens:
            img = list(range(len(dom)))
            for i, j in enumerate(s):
                img[pos[part.domain[i]]] = pos[part.domain[j]]
            gens.append(Perm(img))
    return FinPermGroup.on_sorted(dom, gens, e.h.elem_cap)


def validate(e, path: str = "root") -> list[str]:
    """List of violations; empty when the expression is well formed."""
    out: list[str] = []
    if isinstance(e, Finite):
        if e.group.degree == 0:
            out.append(f"{path}: empty domain")
    elif isinstance(e, DirectProduct):
        if not e.parts:
            out.append(f"{path}: empty product")
        for j, p in enumerate(e.parts):
            out.extend(validate(p, f"{path}.parts[{j}]"))
    elif isinstance(e, WreathOmega):
        out.extend(validate(e.inner, f"{path}.inner"))
    elif isinstance(e, Cons):
        out.extend(_validate_cons(e, path))
    else:
        out.append(f"{path}: not a group expression")
    return out


def _validate_cons(e: Cons, path: str) -> list[str]:
    out = []
    if not e.parts:
        out.append(f"{path}: no parts")
    seen = set(e.y0)
    for j, p in enumerate(e.parts):
        if p.degree == 0:
            out.append(f"{path}.parts[{j}]: empty block")
        clash = seen.intersection(p.domain)
        if clash:
            out.append(f"{path}.parts[{j}]: overlapping labels")
        seen.update(p.domain)
    if out:
        return out
    dom = base_domain(e)
    if list(e.h.domain) != dom:
        return [f"{path}.h: domain differs from y0 plus part domains"]
    y0 = {e.h.index_of(x) for x in e.y0}
    if any(s[i] not in y0 for s in e.h.gens for i in y0):
        out.append(f"{path}.h: does not fix y0 setwise")
    block = {}
    for j, p in enumerate(e.parts):
        block.update({e.h.index_of(x): j for x in p.domain})
    if any(len({block.get(s[e.h.index_of(x)], -1) for x in p.domain}) != 1
           for s in e.h.gens for p in e.parts):
        out.append(f"{path}.h: does not map blocks onto blocks")
    rel = subgroup_relation(cons_normal_core(e), e.h)
    if not rel["subgroup"]:
        out.append(f"{path}.parts: N not normal in h (not a subgroup)")
    elif not rel["normal"]:
        out.append(f"{path}.parts: N not normal in h")
    return out


def profile_signature(e, n_max: int) -> dict:
    """Degrees and orders of the truncations ``t = 1..n_max`` together with the
    orbit profile of the largest one.  Separates many expressions cheaply."""
    from .analysis import orbit_profile
    from .construct import truncate

    degrees, orders = [], []
    g = None
    for t in range(1, n_max + 1):
        g, _ = truncate(e, t)
        degrees.append(g.degree)
        orders.append(g.order())
    prof = orbit_profile(g, n_max)
    return {"degrees": degrees, "orders": orders,
            "o": prof.o, "oi": prof.oi, "os": prof.os}
