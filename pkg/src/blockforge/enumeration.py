"""Exhaustive oracles: all separations, automorphisms, canonicity.

Everything here is deliberately brute force.  A configurable vertex cap
bounds the exponential scans so misuse fails fast instead of hanging.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .graph_core import (
    Graph,
    Mask,
    Separation,
    bits,
    mask_of,
)

SeparationSystem = tuple[Separation, ...]

DEFAULT_CAP = 14

_cap = DEFAULT_CAP


class CapExceededError(ValueError):
    """Graph too large for the exhaustive scans."""


def get_cap() -> int:
    return _cap


def set_cap(value: int) -> int:
    """Set the global vertex cap; returns the previous value."""
    global _cap
    if value < 1:
        raise ValueError(f"cap must be at least 1, got {value}")
    old = _cap
    _cap = value
    return old


def require_within_cap(n: int) -> None:
    if n > _cap:
        raise CapExceededError(
            f"graph has {n} vertices, above the exhaustive-scan cap of {_cap}"
        )


@lru_cache(maxsize=None)
def enumerate_separations(g: Graph, max_order: int) -> SeparationSystem:
    """All separations of g with order < max_order, both orientations.

    Grouped scan over candidate separators: a pair (A, B) is a separation
    exactly when, with Z = A cap B, each component of G - Z lies wholly in
    A or wholly in B.  Ranging over every Z and every two-sided grouping
    of components therefore hits each separation exactly once; it covers
    the same space as the 3^n side-assignment scan minus the assignments
    that violate the cross-edge predicate.
    """
    require_within_cap(g.n)
    if max_order > g.n:
        raise ValueError(f"max_order {max_order} exceeds vertex count {g.n}")
    out: list[Separation] = []
    verts = range(g.n)
    for size in range(min(max_order, g.n + 1)):
        for zs in combinations(verts, size):
            z = mask_of(zs)
            comps = g.components(within=g.full_mask & ~z)
            c = len(comps)
            for pick in range(1 << c):
                a = z
                b = z
                for i in range(c):
                    if pick >> i & 1:
                        a |= comps[i]
                    else:
                        b |= comps[i]
                out.append(Separation(a, b))
    out.sort(key=Separation.sort_key)
    return tuple(out)


@dataclass(frozen=True)
class AutomorphismGroup:
    """All adjacency-preserving vertex permutations of a graph."""

    permutations: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.permutations)

    def __iter__(self):
        return iter(self.permutations)

    def is_trivial(self) -> bool:
        return len(self.permutations) == 1


def apply_perm_to_mask(perm: tuple[int, ...], mask: Mask) -> Mask:
    # hot path: unrolled bit scan, no generator frames
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << perm[low.bit_length() - 1]
        mask ^= low
    return out


def apply_perm_to_separation(perm: tuple[int, ...], s: Separation) -> Separation:
    return Separation(apply_perm_to_mask(perm, s.a), apply_perm_to_mask(perm, s.b))


def compose_perms(outer: tuple[int, ...], inner: tuple[int, ...]) -> tuple[int, ...]:
    """Composition outer after inner."""
    return tuple(outer[inner[v]] for v in range(len(inner)))


def invert_perm(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for v, w in enumerate(perm):
        inv[w] = v
    return tuple(inv)


@lru_cache(maxsize=None)
def automorphisms(g: Graph) -> AutomorphismGroup:
    """Full automorphism group by backtracking.

    Candidate images are pruned by (degree, sorted neighbour degrees);
    that is enough at this scale, no canonical-labelling machinery.
    """
    require_within_cap(g.n)
    n = g.n
    degs = [g.degree(v) for v in range(n)]
    sig = [
        (degs[v], tuple(sorted(degs[u] for u in bits(g.adj[v]))))
        for v in range(n)
    ]
    candidates = [
        tuple(w for w in range(n) if sig[w] == sig[v]) for v in range(n)
    ]
    # most constrained vertices first shrinks the search tree
    order = sorted(range(n), key=lambda v: (len(candidates[v]), v))
    found: list[tuple[int, ...]] = []
    image = [-1] * n
    used = [False] * n

    def extend(i: int) -> None:
        if i == n:
            found.append(tuple(image))
            return
        v = order[i]
        adj_v = g.adj[v]
        for w in candidates[v]:
            if used[w]:
                continue
            ok = True
            for j in range(i):
                u = order[j]
                if bool(adj_v >> u & 1) != bool(g.adj[w] >> image[u] & 1):
                    ok = False
                    break
            if ok:
                image[v] = w
                used[w] = True
                extend(i + 1)
                used[w] = False
                image[v] = -1

    extend(0)
    found.sort()
    return AutomorphismGroup(tuple(found))


@lru_cache(maxsize=None)
def generating_permutations(g: Graph) -> tuple[tuple[int, ...], ...]:
    """Small generating set for the automorphism group.

    Closure of a finite family under bijections is closure under the
    group they generate, so invariance checks and orbit walks only need
    these.  Built as the transversals of a stabilizer chain: partition
    the group by the image of the first moved point, keep the least
    representative per image, recurse into the stabilizer.  A product
    of representatives reaches every element, so the union generates.
    Cost is a few scans of the element list, never a span search.
    Identity group yields an empty tuple.
    """
    level = list(automorphisms(g).permutations)
    gens: list[tuple[int, ...]] = []
    while len(level) > 1:
        base = min(
            v for p in level for v in range(g.n) if p[v] != v
        )
        by_image: dict[int, tuple[int, ...]] = {}
        stabilizer = []
        for p in level:
            w = p[base]
            if w == base:
                stabilizer.append(p)
            elif w not in by_image or p < by_image[w]:
                by_image[w] = p
        gens.extend(by_image[w] for w in sorted(by_image))
        level = stabilizer
    return tuple(gens)


@lru_cache(maxsize=None)
def canonical_labeling(g: Graph) -> tuple[int, ...]:
    """A permutation v -> new label making the adjacency rows smallest.

    Isomorphic graphs relabel to the identical edge set, which lets a
    deterministic algorithm produce corresponding output on isomorphic
    inputs.  Any two minimizing labelings differ by an automorphism of
    the relabeled graph, so which one is returned does not matter for
    that purpose.

    Layer-by-layer search: position i tries every unplaced vertex and
    keeps exactly those whose adjacency row to the placed prefix is
    minimal; tied prefixes are deduplicated up to automorphism.
    """
    require_within_cap(g.n)
    auts = automorphisms(g).permutations
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(g.n):
        best_row = -1
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for pre in frontier:
            used = set(pre)
            for v in range(g.n):
                if v in used:
                    continue
                row = 0
                for j, o in enumerate(pre):
                    if g.adj[v] >> o & 1:
                        row |= 1 << j
                if best_row < 0 or row < best_row:
                    best_row = row
                    nxt = {}
                if row == best_row:
                    seq = pre + (v,)
                    if len(auts) == 1:
                        rep = seq
                    else:
                        rep = min(tuple(p[x] for x in seq) for p in auts)
                    nxt.setdefault(rep, seq)
        frontier = list(nxt.values())
    return invert_perm(frontier[0])


def is_canonical_system(g: Graph, seps: Iterable[Separation]) -> bool:
    """True iff the system is closed under every automorphism of g.

    Checked against a generating set: a bijection mapping the finite
    set into itself maps it onto itself, so generator closure already
    gives closure under the whole group.
    """
    members = set(seps)
    for perm in generating_permutations(g):
        for s in members:
            if apply_perm_to_separation(perm, s) not in members:
                return False
    return True


def orbit_closure(g: Graph, seps: Iterable[Separation]) -> SeparationSystem:
    """Smallest automorphism-closed superset, deterministically sorted."""
    gens = generating_permutations(g)
    closed = set(seps)
    frontier = list(closed)
    while frontier:
        s = frontier.pop()
        for perm in gens:
            image = apply_perm_to_separation(perm, s)
            if image not in closed:
                closed.add(image)
                frontier.append(image)
    return tuple(sorted(closed, key=Separation.sort_key))


def min_distinguisher_order(
    g: Graph, p: Iterable[Separation], q: Iterable[Separation]
) -> int | None:
    """Minimum order of a separation oriented one way by p, the other by q.

    Returns None when the two orientations never disagree, i.e. when the
    profiles are indistinguishable.
    """
    q_members = set(q)
    best: int | None = None
    for s in p:
        if s.inverse() in q_members:
            o = s.order()
            if best is None or o < best:
                best = o
    return best
