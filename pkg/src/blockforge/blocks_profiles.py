"""Inseparable sets, blocks, profiles, robustness and havens.

A set is inseparable w.r.t. a separation system exactly when no member
separates any 2-subset, so inseparability is pairwise and the subset
scan below runs on a per-vertex incompatibility table.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Iterator

from .enumeration import (
    SeparationSystem,
    enumerate_separations,
    require_within_cap,
)
from .graph_core import (
    Graph,
    Mask,
    Separation,
    bit_list,
    bits,
    format_mask,
    is_proper,
    separates,
)

if TYPE_CHECKING:
    from .tree_decomp import TreeDecomposition


@dataclass(frozen=True)
class Block:
    """Maximal inseparable vertex set, tagged with what defined it."""

    vertices: Mask
    with_respect_to: int | SeparationSystem

    def size(self) -> int:
        return self.vertices.bit_count()


def _incompatibility(g: Graph, seps: SeparationSystem) -> list[Mask]:
    """table[v] = vertices split from v by some member of seps."""
    table = [0] * g.n
    for s in seps:
        only_a = s.a & ~s.b
        only_b = s.b & ~s.a
        if only_a and only_b:
            for v in bits(only_a):
                table[v] |= only_b
            for v in bits(only_b):
                table[v] |= only_a
    return table


@lru_cache(maxsize=None)
def s_blocks(
    g: Graph, seps: SeparationSystem, universe: Mask | None = None
) -> tuple[Block, ...]:
    """All maximal seps-inseparable subsets of the universe.

    Exhaustive scan over subsets; X qualifies iff no member splits a
    pair inside X and every outside vertex is split from some vertex
    of X (otherwise X is not maximal).
    """
    require_within_cap(g.n)
    uni = g.full_mask if universe is None else universe
    table = _incompatibility(g, seps)
    incompat = {v: table[v] & uni for v in bits(uni)}
    subs = sorted(_all_submasks(uni))
    bad: dict[Mask, Mask] = {0: 0}
    out = []
    for x in subs:
        if x == 0:
            if uni == 0:
                out.append(Block(0, seps))
            continue
        low = x & -x
        b = bad[x ^ low] | incompat[low.bit_length() - 1]
        bad[x] = b
        if b & x == 0 and (uni & ~(b | x)) == 0:
            out.append(Block(x, seps))
    return tuple(sorted(out, key=lambda blk: blk.vertices))


def _all_submasks(mask: Mask) -> list[Mask]:
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            return subs
        sub = (sub - 1) & mask


@lru_cache(maxsize=None)
def k_blocks(g: Graph, k: int) -> tuple[Block, ...]:
    """Maximal S_<k-inseparable sets of size at least k."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    seps = enumerate_separations(g, min(k, g.n))
    found = s_blocks(g, seps)
    return tuple(
        Block(blk.vertices, k) for blk in found if blk.size() >= k
    )


@dataclass(frozen=True)
class Profile:
    """Orientation of all separations of order < k: consistent, satisfies (P).

    Membership is by chosen orientation; exactly one of (A,B), (B,A)
    per underlying pair belongs to the profile.
    """

    k: int
    members: frozenset[Separation]

    def __contains__(self, s: object) -> bool:
        return s in self.members

    def __iter__(self) -> Iterator[Separation]:
        return iter(sorted(self.members, key=Separation.sort_key))

    def __len__(self) -> int:
        return len(self.members)

    def sort_key(self) -> tuple:
        return (self.k, tuple(s.sort_key() for s in self))


def _consistency_clash(s: Separation, t: Separation) -> bool:
    # both chosen yet t.inverse() <= s, which forces the unchosen t
    return (t.b & ~s.a) == 0 and (s.b & ~t.a) == 0


def is_profile(g: Graph, orientation: Iterable[Separation], k: int) -> bool:
    """Exhaustive check: orients all of S_<k, consistent, satisfies (P)."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k > g.n:
        # S_<k then contains (V,V), whose own corner violates (P)
        return False
    members = list(orientation)
    memset = set(members)
    if len(memset) != len(members):
        return False
    universe = enumerate_separations(g, k)
    if len(memset) * 2 != len(universe):
        return False
    for s in memset:
        if s not in universe or s.inverse() in memset:
            return False
    for i, s in enumerate(members):
        for t in members[i:]:
            if _consistency_clash(s, t):
                return False
            if Separation(s.b & t.b, s.a | t.a) in memset:
                return False
    return True


@lru_cache(maxsize=None)
def block_profile(g: Graph, block: Mask, k: int) -> Profile:
    """P_k(block): every (<k)-separation oriented toward the block."""
    members = []
    for s in enumerate_separations(g, k):
        if block & ~s.b == 0:
            if block & ~s.a == 0:
                raise ValueError(
                    f"{format_mask(block)} fits inside the separator of "
                    f"an order-{s.order()} separation; not a {k}-block"
                )
            members.append(s)
        elif block & ~s.a:
            raise ValueError(
                f"({format_mask(s.a)}, {format_mask(s.b)}) separates "
                f"{format_mask(block)}; not a {k}-block"
            )
    profile = Profile(k, frozenset(members))
    if not is_profile(g, profile.members, k):
        raise RuntimeError(
            f"orientation toward {format_mask(block)} is not a {k}-profile"
        )
    return profile


@lru_cache(maxsize=None)
def enumerate_profiles(g: Graph, k: int) -> tuple[Profile, ...]:
    """All k-profiles, by backtracking over proper pairs in order.

    Improper separations get their forced orientation (X, V) up front;
    choosing (V, X) would clash with (X, V) <= (V, X).  Corners of two
    improper members have the shape (V, X cup Y) and can never be chosen,
    so the seeded members need no pairwise screening.
    """
    require_within_cap(g.n)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k > g.n:
        return ()
    universe = enumerate_separations(g, k)
    forced = [s for s in universe if s.b == g.full_mask]
    proper_reps = sorted(
        (s for s in universe if is_proper(s) and s.a < s.b),
        key=Separation.sort_key,
    )
    chosen: list[Separation] = list(forced)
    chosen_set: set[Separation] = set(chosen)
    forbidden: dict[Separation, int] = {}
    results: list[Profile] = []

    def try_choose(u: Separation) -> list[Separation] | None:
        """Admit u if no axiom breaks; returns forbidden-corner additions."""
        if forbidden.get(u):
            return None
        added = []
        for s in chosen:
            if _consistency_clash(u, s):
                break
            corner = Separation(u.b & s.b, u.a | s.a)
            if corner in chosen_set or corner == u:
                break
            forbidden[corner] = forbidden.get(corner, 0) + 1
            added.append(corner)
        else:
            return added
        for c in added:
            forbidden[c] -= 1
        return None

    def undo(u: Separation, added: list[Separation]) -> None:
        chosen.pop()
        chosen_set.discard(u)
        for c in added:
            forbidden[c] -= 1

    def extend(i: int) -> None:
        if i == len(proper_reps):
            results.append(Profile(k, frozenset(chosen)))
            return
        rep = proper_reps[i]
        for u in (rep, rep.inverse()):
            added = try_choose(u)
            if added is None:
                continue
            chosen.append(u)
            chosen_set.add(u)
            extend(i + 1)
            undo(u, added)

    extend(0)
    return tuple(sorted(results, key=Profile.sort_key))


@lru_cache(maxsize=None)
def is_r_robust(g: Graph, p: Profile, r: int) -> bool:
    """Corner condition against every separation of order at most r.

    For (A,B) in p and candidate (C,D), one of (A cup C, B cap D) and
    (A cup D, B cap C) must have order >= k-1 or lie in p.  The condition
    is symmetric under C <-> D, so candidates are scanned one orientation
    per pair; improper candidates satisfy it automatically and are skipped.
    """
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    threshold = p.k - 1
    members = p.members
    scan_order = min(r + 1, g.n)
    candidates = [
        c
        for c in enumerate_separations(g, scan_order)
        if c.order() <= r and is_proper(c) and c.a < c.b
    ]
    for s in members:
        for c in candidates:
            one = Separation(s.a | c.a, s.b & c.b)
            if one.order() >= threshold or one in members:
                continue
            two = Separation(s.a | c.b, s.b & c.a)
            if two.order() >= threshold or two in members:
                continue
            return False
    return True


def is_robust(g: Graph, p: Profile) -> bool:
    """Robust without a bound: r-robust for every r, i.e. for r = n."""
    return is_r_robust(g, p, g.n)


@lru_cache(maxsize=None)
def maximal_robust_profiles(g: Graph) -> tuple[Profile, ...]:
    """Robust profiles not strictly below a robust profile of higher order.

    A lower-order profile sits inside a higher-order one exactly when it
    is the restriction, i.e. member-subset containment; containment is
    automatically strict across distinct orders.
    """
    require_within_cap(g.n)
    by_order: dict[int, list[Profile]] = {}
    for k in range(1, g.n + 1):
        robust = [p for p in enumerate_profiles(g, k) if is_robust(g, p)]
        if robust:
            by_order[k] = robust
    survivors: list[Profile] = []
    orders = sorted(by_order)
    for k in orders:
        for p in by_order[k]:
            dominated = any(
                p.members <= q.members
                for higher in orders
                if higher > k
                for q in by_order[higher]
            )
            if not dominated:
                survivors.append(p)
    return tuple(sorted(survivors, key=Profile.sort_key))


def haven_component(g: Graph, p: Profile, x: Mask) -> Mask:
    """The unique component C of G - x with (V minus C, C cup x) in p."""
    if x.bit_count() >= p.k:
        raise ValueError(
            f"x has {x.bit_count()} vertices, needs fewer than k={p.k}"
        )
    full = g.full_mask
    hits = []
    for comp in g.components(within=full & ~x):
        if Separation(full & ~comp, comp | x) in p.members:
            hits.append(comp)
    if len(hits) != 1:
        raise RuntimeError(
            f"profile orients {len(hits)} components of G - {format_mask(x)} "
            "toward itself; profile axioms falsified"
        )
    comp = hits[0]
    tightened = Separation(full & ~comp, comp | g.neighbourhood(comp))
    if tightened not in p.members:
        raise RuntimeError(
            f"(V - C, C + N(C)) escaped the profile for C={format_mask(comp)}"
        )
    return comp


def inhabits(g: Graph, p: Profile, td: "TreeDecomposition", t: int) -> bool:
    """True iff every member of p keeps its far side inside part t."""
    part = td.parts[t]
    for s in p.members:
        if not (s.b & ~s.a & part):
            return False
    return True


def profile_to_obj(p: Profile) -> dict:
    """JSON-ready form; sides as hex bitset strings."""
    return {
        "k": p.k,
        "members": [[hex(s.a), hex(s.b)] for s in p],
    }


def profile_from_obj(obj: dict) -> Profile:
    k = obj["k"]
    members = frozenset(
        Separation(int(a, 16), int(b, 16)) for a, b in obj["members"]
    )
    return Profile(k, members)
