"""Small named expressions and structures shared by the verify suite and tests."""

from __future__ import annotations

from .expr import Cons, Finite, wr
from .permcore import from_cycles, sym, trivial
from .structures import RelStruct, equivalence, graph, pure_set


def pure_set_expr():
    """Symmetric group on a countable set."""
    return wr(Finite(trivial(["p"])))


def en_expr(n: int):
    """Nested equivalences of depth ``n`` (``n = 0`` is a single point)."""
    return wr(Finite(trivial(["p"])), n)


def cons_fixtures() -> dict:
    """name -> (expression, truncation sizes used by the oracle comparison)."""
    return {
        "swap2": (Cons([], [trivial("ab")], sym("ab")), (2, 3)),
        "normal_only": (Cons(["z"], [sym("ab")], from_cycles("abz", [[("a", "b")]])), (2, 3)),
        "block_swap": (Cons([], [trivial("a"), trivial("b")], sym("ab")), (2, 3)),
        "c3_in_s3": (Cons(["z"], [from_cycles("abc", [[("a", "b", "c")]])],
                          from_cycles("abcz", [[("a", "b")], [("a", "b", "c")]])), (2, 3)),
        "klein_pair": (Cons([], [trivial("ab"), trivial("cd")],
                            from_cycles("abcd", [[("a", "b"), ("c", "d")], [("a", "c"), ("b", "d")]])), (2, 3)),
        "fixed_pair": (Cons(["w", "z"], [trivial("a")], from_cycles("awz", [[("w", "z")]])), (2, 3)),
        "a4_in_s4": (Cons([], [from_cycles("abcd", [[("a", "b", "c")], [("b", "c", "d")]])], sym("abcd")), (2,)),
    }


def c8() -> RelStruct:
    return graph([str(i) for i in range(8)], [(str(i), str((i + 1) % 8)) for i in range(8)])


def c5() -> RelStruct:
    return graph([str(i) for i in range(5)], [(str(i), str((i + 1) % 5)) for i in range(5)])


def eq2x2() -> RelStruct:
    return equivalence([["a", "b"], ["c", "d"]])


def directed_triangle() -> RelStruct:
    return RelStruct("abc", [("R", 2)], {"R": [(0, 1), (1, 2), (2, 0)]})


def alternating4() -> RelStruct:
    """Ternary relation whose automorphism group is the alternating group on 4 points."""
    even = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 3), (2, 3, 0), (3, 0, 2),
            (0, 3, 1), (3, 1, 0), (1, 0, 3), (1, 3, 2), (3, 2, 1), (2, 1, 3)]
    return RelStruct("abcd", [("T", 3)], {"T": even})


def marked_eq2x2() -> RelStruct:
    """Two classes of two, one class picked out by a unary predicate."""
    a = eq2x2()
    return RelStruct(a.domain, list(a.signature) + [("U", 1)],
                     {"E": a.relations["E"], "U": [(0,), (1,)]})


def pure5() -> RelStruct:
    return pure_set(["a", "b", "c", "d", "e"])
