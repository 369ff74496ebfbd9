"""Closed supergroups of a finite permutation group inside the full symmetric
group on its domain, found by adjoining one permutation at a time."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .permcore import FinPermGroup, Perm, compose, generate_elements, label_str


@dataclass
class LatticeReport:
    domain: tuple
    groups: list  # FinPermGroup, sorted by (order, elements)
    added: list  # per group: permutations adjoined to the base generators
    edges: list  # cover relations (i, j): groups[i] < groups[j]

    @property
    def count(self) -> int:
        return len(self.groups)

    def to_json(self) -> dict:
        return {"domain": [label_str(x) for x in self.domain],
                "count": self.count,
                "groups": [{"order": g.order(), "added": [list(p) for p in a]}
                           for g, a in zip(self.groups, self.added)],
                "edges": [list(e) for e in self.edges]}

    def to_dot(self) -> str:
        lines = ["digraph lattice {", "  rankdir=BT;"]
        for i, g in enumerate(self.groups):
            lines.append(f'  g{i} [label="{i}: order {g.order()}"];')
        for a, b in self.edges:
            lines.append(f"  g{a} -> g{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _adjoin(domain, gens, s, cap):
    g = FinPermGroup.on_sorted(domain, list(gens) + [s], cap)
    return frozenset(generate_elements(g, cap))


def intermediate_groups(g: FinPermGroup, workers: int = 1, max_degree: int = 7) -> LatticeReport:
    """Every group between ``g`` and the symmetric group on its domain."""
    n = g.degree
    if n > max_degree:
        raise ValueError(f"domain of size {n} exceeds the limit {max_degree}")
    full = sorted(Perm(p) for p in itertools.permutations(range(n)))
    start = frozenset(g.elements())
    found = {start: ()}
    frontier = [start]
    while frontier:
        tasks = []
        for k in sorted(frontier, key=lambda x: (len(x), sorted(x))):
            covered = set(k)
            for s in full:
                if s in covered:
                    continue
                # every element of the double coset k s k generates the same group
                covered.update(Perm(compose(compose(a, s), b)) for a in k for b in k)
                tasks.append((k, s))

        def run(task):
            k, s = task
            return k, s, _adjoin(g.domain, list(g.gens) + list(found[k]), s, g.elem_cap)

        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                results = list(ex.map(run, tasks))
        else:
            results = [run(t) for t in tasks]
        nxt = []
        for k, s, elems in results:
            if elems not in found:
                found[elems] = tuple(found[k]) + (s,)
                nxt.append(elems)
        frontier = nxt
    ordered = sorted(found, key=lambda x: (len(x), sorted(x)))
    groups = [FinPermGroup.from_elements(g.domain, x, g.elem_cap) for x in ordered]
    added = [list(found[x]) for x in ordered]
    edges = []
    for i, a in enumerate(ordered):
        for j, b in enumerate(ordered):
            if i != j and len(a) < len(b) and a <= b:
                if not any(len(a) < len(c) < len(b) and a <= c <= b for c in ordered):
                    edges.append((i, j))
    return LatticeReport(g.domain, groups, added, edges)


def reduct_count(a, workers: int = 1) -> int:
    """Number of closed supergroups of the automorphism group of ``a``."""
    from .structures import aut_group

    return intermediate_groups(aut_group(a), workers).count


def width_monotonicity_report(g: FinPermGroup, t: int = 3, n_max: int = 3) -> dict:
    """Width and orbit counts along every cover relation of the supergroup lattice.

    Larger groups must have no larger width and no more orbits on tuples.
    """
    from .analysis import orbit_profile, width
    from .expr import Finite

    lat = intermediate_groups(g)
    widths = [width(Finite(h), t).width for h in lat.groups]
    profiles = [orbit_profile(h, n_max) for h in lat.groups]
    bad_width, bad_orbits = [], []
    for a, b in lat.edges:
        if widths[a] < widths[b]:
            bad_width.append((a, b))
        pa, pb = profiles[a], profiles[b]
        if any(x < y for x, y in zip(pa.o + pa.oi + pa.os, pb.o + pb.oi + pb.os)):
            bad_orbits.append((a, b))
    histogram: dict = {}
    for w in widths:
        histogram[(0, w)] = histogram.get((0, w), 0) + 1
    return {"count": lat.count, "widths": widths,
            "width_violations": bad_width, "orbit_violations": bad_orbits,
            "histogram": {f"rank=0,width={w}": c for (_, w), c in sorted(histogram.items())},
            "monotone": not bad_width and not bad_orbits}
