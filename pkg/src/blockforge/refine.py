"""Extending a nested system until it distinguishes a profile set.

A nested system rarely distinguishes every pair of profiles on its own.
The extension works torso by torso: each profile of the whole graph
projects to a profile of each torso, a canonical decomposition of the
torso separates the projected profiles, and gluing those decompositions
into the host yields the enlarged nested system.  Done this way the
extension keeps nestedness, keeps every original member, reaches every
distinguishable pair at its minimum possible order, and commutes with
the automorphisms of the graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .blocks_profiles import (
    Profile,
    block_profile,
    haven_component,
    is_profile,
    k_blocks,
)
from .enumeration import (
    apply_perm_to_separation,
    canonical_labeling,
    enumerate_separations,
    generating_permutations,
    invert_perm,
    is_canonical_system,
    min_distinguisher_order,
    require_within_cap,
)
from .gluing import GluePlan, glue, is_canonical_family
from .graph_core import (
    Graph,
    Mask,
    Separation,
    format_mask,
    format_separation,
    is_proper,
    nested,
)
from .tree_decomp import (
    TreeDecomposition,
    build_from_nested,
    induced_system,
    torso,
)


@dataclass(frozen=True)
class TorsoProfile:
    """A profile of one torso, projected from a profile of the host graph.

    torso_profile lives in the torso's local coordinates.
    """

    node: int
    host_profile: Profile
    torso_profile: Profile


class RefinementSearchError(RuntimeError):
    """The distinguishing-system search exhausted its space.

    A distinguishing nested system always exists, so this means a bug,
    not an unlucky input.
    """


def _map_profile(perm: tuple[int, ...], p: Profile) -> Profile:
    return Profile(
        p.k, frozenset(apply_perm_to_separation(perm, s) for s in p.members)
    )


def induce_profile_on_torso(
    g: Graph, td: TreeDecomposition, t: int, q: Profile
) -> TorsoProfile:
    """Project the profile q of g onto the torso of part t.

    When q points into a component hanging off the part, the projection
    is the block profile of where that component attaches; otherwise
    every torso separation is oriented toward q's haven side.
    """
    tor = torso(g, td, t)
    part = td.parts[t]
    nt = tor.graph.n

    chosen = []
    for comp in g.components(within=g.full_mask & ~part):
        s = Separation(g.full_mask & ~comp, comp | g.neighbourhood(comp))
        if s in q.members:
            chosen.append(comp)
    if len(chosen) > 1:
        raise RuntimeError(
            f"profile points into {len(chosen)} components off part "
            f"{format_mask(part)}; profile axioms falsified"
        )

    if chosen:
        comp = chosen[0]
        hood = g.neighbourhood(comp)
        m = hood.bit_count()
        if m < 1:
            raise ValueError(
                f"component {format_mask(comp)} has no attachment, graph disconnected"
            )
        hood_local = tor.local_mask(hood)
        holders = [
            b.vertices
            for b in k_blocks(tor.graph, m)
            if hood_local & ~b.vertices == 0
        ]
        if not holders:
            raise ValueError(
                f"no {m}-block of the torso at {format_mask(part)} contains "
                f"the attachment {format_mask(hood)}"
            )
        if len(holders) > 1:
            raise RuntimeError(
                f"two {m}-blocks contain {format_mask(hood)}; "
                "blocks are not maximal"
            )
        return TorsoProfile(t, q, block_profile(tor.graph, holders[0], m))

    k_t = min(q.k, nt)
    members = []
    for s in enumerate_separations(tor.graph, k_t):
        if s.b == tor.graph.full_mask:
            members.append(s)
            continue
        if not is_proper(s) or s.inverse().sort_key() < s.sort_key():
            continue
        comp = haven_component(g, q, tor.host_mask(s.separator()))
        inter = comp & part
        if not inter:
            raise RuntimeError(
                f"haven component misses part {format_mask(part)} although "
                "no off-part component is chosen"
            )
        in_a = bool(inter & tor.host_mask(s.a & ~s.b))
        in_b = bool(inter & tor.host_mask(s.b & ~s.a))
        if in_a == in_b:
            raise RuntimeError(
                f"haven side of {format_separation(s)} is ambiguous on part "
                f"{format_mask(part)}"
            )
        members.append(s if in_b else s.inverse())
    profile = Profile(k_t, frozenset(members))
    if not is_profile(tor.graph, profile.members, k_t):
        raise RuntimeError(
            f"projection of a profile onto part {format_mask(part)} "
            "is not a profile"
        )
    return TorsoProfile(t, q, profile)


def nested_universe(
    g: Graph, system: Iterable[Separation], k: int
) -> tuple[Separation, ...]:
    """All separations of order below k nested with every system member."""
    system = tuple(system)
    return tuple(
        s
        for s in enumerate_separations(g, k)
        if all(nested(s, m) for m in system)
    )


def _unit(s: Separation) -> tuple[Separation, Separation]:
    t = s.inverse()
    return (s, t) if s.sort_key() <= t.sort_key() else (t, s)


@lru_cache(maxsize=None)
def _distinguishing_system(
    h: Graph, ps: tuple[Profile, ...]
) -> tuple[Separation, ...]:
    """Smallest orbit-closed nested system separating the given profiles.

    ps must be closed under the automorphisms of h.  Levels run from the
    lowest pair order upward; at each level the candidates are the
    efficient distinguishers of that level's pairs, grouped into orbits,
    and subsets of orbits are tried smallest-first with backtracking
    across levels.
    """
    gens = generating_permutations(h)
    pairs = []
    for p, q in combinations(ps, 2):
        d = min_distinguisher_order(h, p.members, q.members)
        if d is not None:
            pairs.append((d, p, q))
    orders = sorted({d for d, _, _ in pairs})

    def level_orbits(
        d: int, chosen: tuple[Separation, ...]
    ) -> tuple[list[frozenset], dict, list]:
        level_pairs = [(p, q) for dd, p, q in pairs if dd == d]
        cover: dict[tuple, set[int]] = {}
        for idx, (p, q) in enumerate(level_pairs):
            for s in p.members:
                if s.order() == d and s.inverse() in q.members:
                    cover.setdefault(_unit(s), set()).add(idx)
        units = [
            u for u in cover if all(nested(u[0], c) for c in chosen)
        ]
        orbits: set[frozenset] = set()
        assigned: set[tuple] = set()
        for u in units:
            if u in assigned:
                continue
            orbit = {u}
            frontier = [u]
            while frontier:
                x = frontier.pop()
                for perm in gens:
                    y = _unit(apply_perm_to_separation(perm, x[0]))
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)
            assigned |= orbit
            orbits.add(frozenset(orbit))
        for orbit in orbits:
            for u in orbit:
                if u not in cover:
                    raise RefinementSearchError(
                        f"orbit member {format_separation(u[0])} distinguishes "
                        "no pair; profile set is not orbit-closed"
                    )
        ordered = sorted(
            orbits, key=lambda orb: tuple(sorted(u[0].sort_key() for u in orb))
        )
        return ordered, cover, level_pairs

    def extend(
        level: int, chosen: tuple[Separation, ...]
    ) -> tuple[Separation, ...] | None:
        if level == len(orders):
            return chosen
        d = orders[level]
        ordered, cover, level_pairs = level_orbits(d, chosen)
        need = set(range(len(level_pairs)))
        for size in range(1, len(ordered) + 1):
            for combo in combinations(ordered, size):
                units = sorted(
                    {u for orb in combo for u in orb},
                    key=lambda u: u[0].sort_key(),
                )
                covered: set[int] = set()
                for u in units:
                    covered |= cover[u]
                if covered != need:
                    continue
                flat = [s for u in units for s in u]
                if any(
                    not nested(x, y) for x, y in combinations(flat, 2)
                ):
                    continue
                got = extend(level + 1, chosen + tuple(flat))
                if got is not None:
                    return got
        return None

    out = extend(0, ())
    if out is None:
        raise RefinementSearchError(
            "no orbit-closed nested selection distinguishes all pairs; "
            "this contradicts the existence guarantee"
        )
    return tuple(sorted(set(out), key=Separation.sort_key))


def canonical_distinguishing_td(
    h: Graph, ps: Iterable[Profile]
) -> TreeDecomposition:
    """Automorphism-invariant decomposition separating the given profiles.

    Distinguishable pairs are separated efficiently, the adhesion stays
    below the largest profile order, and every induced separation earns
    its place by distinguishing some pair.  The profile set is closed
    under the automorphisms of h first, so isomorphic inputs yield
    corresponding outputs.
    """
    require_within_cap(h.n)
    closed: set[Profile] = set()
    frontier: list[Profile] = []
    for p in ps:
        if not is_profile(h, p.members, p.k):
            raise ValueError(f"not a {p.k}-profile of the graph")
        if p not in closed:
            closed.add(p)
            frontier.append(p)
    gens = generating_permutations(h)
    while frontier:
        p = frontier.pop()
        for perm in gens:
            image = _map_profile(perm, p)
            if image not in closed:
                closed.add(image)
                frontier.append(image)
    profiles = tuple(sorted(closed, key=Profile.sort_key))

    perm = canonical_labeling(h)
    hc = h.relabel(perm)
    psc = tuple(
        sorted(
            {_map_profile(perm, p) for p in profiles}, key=Profile.sort_key
        )
    )
    inv = invert_perm(perm)
    system = tuple(
        sorted(
            {
                apply_perm_to_separation(inv, s)
                for s in _distinguishing_system(hc, psc)
            },
            key=Separation.sort_key,
        )
    )
    td = build_from_nested(h, system)

    if not is_canonical_system(h, system):
        raise RuntimeError("distinguishing system is not automorphism-closed")
    k_top = max((p.k for p in profiles), default=1)
    for t, u in td.edges:
        if td.adhesion_set(t, u).bit_count() >= k_top:
            raise RuntimeError(
                f"adhesion {format_mask(td.adhesion_set(t, u))} reaches "
                f"order {k_top}"
            )
    pair_d = {}
    for p, q in combinations(profiles, 2):
        d = min_distinguisher_order(h, p.members, q.members)
        if d is not None:
            pair_d[(p, q)] = d
    for (p, q), d in pair_d.items():
        if not any(
            s.order() == d and s in p.members and s.inverse() in q.members
            for s in system
        ):
            raise RuntimeError("a distinguishable pair was left unseparated")
    for s in system:
        if not any(
            d == s.order()
            and (s in p.members and s.inverse() in q.members
                 or s.inverse() in p.members and s in q.members)
            for (p, q), d in pair_d.items()
        ):
            raise RuntimeError(
                f"{format_separation(s)} distinguishes nothing efficiently"
            )
    return td


def _is_closed_profile_set(g: Graph, ps: tuple[Profile, ...]) -> bool:
    # generator closure suffices: bijections map the finite set onto itself
    pset = set(ps)
    return all(
        _map_profile(perm, p) in pset
        for perm in generating_permutations(g)
        for p in ps
    )


def refine_nested(
    g: Graph, system: Iterable[Separation], ps: Iterable[Profile]
) -> tuple[Separation, ...]:
    """Extend a nested system to distinguish every pair in ps efficiently.

    Every separator of the input system must sit inside a block whose
    induced profile belongs to ps; that guarantees nested efficient
    distinguishers exist for every pair.  The result contains the input
    system, stays nested, and is automorphism-closed whenever the inputs
    are.
    """
    require_within_cap(g.n)
    system = tuple(sorted(set(system), key=Separation.sort_key))
    profiles = tuple(sorted(set(ps), key=Profile.sort_key))

    for s in system:
        sep = s.separator()
        if not any(
            sep & ~b.vertices == 0
            and block_profile(g, b.vertices, p.k) == p
            for p in profiles
            for b in k_blocks(g, p.k)
        ):
            raise ValueError(
                f"separator {format_mask(sep)} lies in no block backing a "
                "given profile"
            )

    nested_distinguisher: dict[tuple[Profile, Profile], Separation] = {}
    for p, q in combinations(profiles, 2):
        d = min_distinguisher_order(g, p.members, q.members)
        if d is None:
            continue
        hits = [
            s
            for s in sorted(p.members, key=Separation.sort_key)
            if s.order() == d
            and s.inverse() in q.members
            and all(nested(s, m) for m in system)
        ]
        if not hits:
            raise RuntimeError(
                "no efficient distinguisher nested with the system; "
                "the refinability guarantee failed"
            )
        nested_distinguisher[(p, q)] = hits[0]

    td = build_from_nested(g, system)

    for (p, q), s in nested_distinguisher.items():
        if any(
            t.order() == s.order()
            and t in p.members
            and t.inverse() in q.members
            for t in system
        ):
            continue
        # the distinguisher must show up properly on some torso, or the
        # per-torso refinements could never separate this pair
        if not any(
            is_proper(Separation(s.a & part, s.b & part)) for part in td.parts
        ):
            raise RuntimeError(
                f"{format_separation(s)} is proper on no part; "
                "refinement cannot reach it"
            )

    torso_decomps = []
    for t in range(len(td.parts)):
        tor = torso(g, td, t)
        tps = sorted(
            {induce_profile_on_torso(g, td, t, q).torso_profile for q in profiles},
            key=Profile.sort_key,
        )
        local_td = canonical_distinguishing_td(tor.graph, tps)
        torso_decomps.append(
            TreeDecomposition(
                tuple(tor.host_mask(p) for p in local_td.parts), local_td.edges
            )
        )
    plan = GluePlan(td, tuple(torso_decomps))

    canonical_inputs = is_canonical_system(g, system) and _is_closed_profile_set(
        g, profiles
    )
    if canonical_inputs and not is_canonical_family(g, plan):
        raise RuntimeError("torso decompositions do not form a canonical family")

    glued = glue(g, plan)
    out = tuple(
        sorted(
            {s for s in induced_system(glued) if is_proper(s)},
            key=Separation.sort_key,
        )
    )

    missing = set(system) - set(out)
    if missing:
        raise RuntimeError(
            f"refinement dropped {format_separation(min(missing))}"
        )
    for p, q in nested_distinguisher:
        d = min_distinguisher_order(g, p.members, q.members)
        if not any(
            s.order() == d and s in p.members and s.inverse() in q.members
            for s in out
        ):
            raise RuntimeError("refined system misses an efficient distinguisher")
    if canonical_inputs and not is_canonical_system(g, out):
        raise RuntimeError("refined system lost automorphism closure")
    return out
