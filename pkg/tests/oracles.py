"""Independent brute-force oracles the tests pin expected values against.

Everything is written straight from the definitions and shares no code
with the library beyond the Graph/Separation value types, so a bug
would have to be made twice to go unnoticed.
"""
from __future__ import annotations

from itertools import permutations, product

from blockforge.graph_core import Graph, Separation, bit_list, mask_of


def literal_separations(g: Graph, max_order: int) -> set[Separation]:
    """All separations of order < max_order, by the 3^n assignment scan.

    Each vertex goes to side A only, side B only, or both; an
    assignment is a separation when no edge joins A-only to B-only.
    """
    out: set[Separation] = set()
    for assignment in product((0, 1, 2), repeat=g.n):
        a = mask_of(v for v in range(g.n) if assignment[v] != 1)
        b = mask_of(v for v in range(g.n) if assignment[v] != 0)
        if (a & b).bit_count() >= max_order:
            continue
        a_only = a & ~b
        b_only = b & ~a
        if any(
            ((1 << u) & a_only and (1 << v) & b_only)
            or ((1 << v) & a_only and (1 << u) & b_only)
            for u, v in g.edges
        ):
            continue
        out.add(Separation(a, b))
    return out


def permutation_automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """Filter all n! vertex permutations; usable up to n = 7 or so."""
    edge_set = {frozenset(e) for e in g.edges}
    return [
        perm
        for perm in permutations(range(g.n))
        if {frozenset((perm[u], perm[v])) for u, v in g.edges} == edge_set
    ]


def separates_set(s: Separation, x: int) -> bool:
    return bool(x & s.a & ~s.b) and bool(x & s.b & ~s.a)


def maximal_inseparable_sets(g: Graph, seps: set[Separation]) -> set[int]:
    """All maximal vertex sets no member of seps separates, by subset scan."""
    inseparable = [
        x
        for x in range(1, 1 << g.n)
        if not any(separates_set(s, x) for s in seps)
    ]
    return {
        x
        for x in inseparable
        if not any(x != y and x & ~y == 0 for y in inseparable)
    }


def naive_k_blocks(g: Graph, k: int) -> set[int]:
    seps = literal_separations(g, k)
    return {
        x
        for x in maximal_inseparable_sets(g, seps)
        if x.bit_count() >= k
    }


def naive_min_distinguisher_order(p_members: frozenset, q_members: frozenset) -> int | None:
    """Minimum order over separations oriented oppositely by two profiles."""
    orders = [
        s.order()
        for s in p_members
        if Separation(s.b, s.a) in q_members
    ]
    return min(orders, default=None)


def group_closure(perms: list[tuple[int, ...]]) -> set[tuple[int, ...]]:
    """Closure of a set of permutations under composition (BFS)."""
    if not perms:
        return set()
    n = len(perms[0])
    identity = tuple(range(n))
    closed = {identity}
    frontier = [identity]
    while frontier:
        here = frontier.pop()
        for p in perms:
            composed = tuple(p[here[i]] for i in range(n))
            if composed not in closed:
                closed.add(composed)
                frontier.append(composed)
    return closed


def vertex_names(mask: int) -> list[int]:
    return bit_list(mask)
