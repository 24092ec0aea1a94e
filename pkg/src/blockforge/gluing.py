"""Compressing, subdividing and gluing tree-decompositions.

Gluing takes a host decomposition plus one decomposition per torso and
assembles a decomposition of the whole graph: each torso decomposition
is subdivided so adjacent parts are strictly comparable, then the pieces
are joined along canonically chosen nodes containing the adhesion sets.
"""
from __future__ import annotations

from dataclasses import dataclass

from .enumeration import apply_perm_to_mask, automorphisms, generating_permutations
from .graph_core import Graph, Mask, bits, format_mask
from .tree_decomp import TreeDecomposition, torso, validate


def compress(td: TreeDecomposition) -> TreeDecomposition:
    """Contract every tree edge joining two equal parts.

    The surviving node of each contracted class is the one with the
    smallest original id; ids are then renumbered densely in order.
    """
    n = td.node_count()
    rep = list(range(n))

    def find(x: int) -> int:
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return x

    for t, u in td.edges:
        if td.parts[t] == td.parts[u]:
            a, b = find(t), find(u)
            if a != b:
                rep[max(a, b)] = min(a, b)
    roots = sorted({find(t) for t in range(n)})
    dense = {r: i for i, r in enumerate(roots)}
    parts = tuple(td.parts[r] for r in roots)
    edges = set()
    for t, u in td.edges:
        a, b = dense[find(t)], dense[find(u)]
        if a != b:
            edges.add((a, b) if a < b else (b, a))
    return TreeDecomposition(parts, tuple(sorted(edges)))


def hat(td: TreeDecomposition) -> TreeDecomposition:
    """Compress, then subdivide each edge with incomparable parts.

    The subdividing node gets the part P_t cap P_u, so afterwards every
    tree edge joins two parts of which exactly one properly contains
    the other.
    """
    base = compress(td)
    parts = list(base.parts)
    edges: list[tuple[int, int]] = []
    for t, u in sorted(base.edges):
        pt, pu = base.parts[t], base.parts[u]
        if pt & ~pu == 0 or pu & ~pt == 0:
            edges.append((t, u))
        else:
            x = len(parts)
            parts.append(pt & pu)
            edges.append((t, x))
            edges.append((x, u))
    return TreeDecomposition(tuple(parts), tuple(sorted(edges)))


def canonical_node_for_clique(hatted: TreeDecomposition, clique: Mask) -> int:
    """The canonical node whose part contains the clique.

    Takes the center of the subtree of parts containing the clique; on
    a central edge the endpoint whose part properly contains the other
    wins.  Any automorphism fixing the clique setwise fixes this part.
    """
    holders = {t for t, p in enumerate(hatted.parts) if clique & ~p == 0}
    if not holders:
        raise ValueError(f"no part contains the clique {format_mask(clique)}")
    alive = set(holders)
    degree = {
        t: sum(1 for u in hatted.neighbours[t] if u in holders) for t in holders
    }
    seed = next(iter(alive))
    reach = {seed}
    stack = [seed]
    while stack:
        for u in hatted.neighbours[stack.pop()]:
            if u in alive and u not in reach:
                reach.add(u)
                stack.append(u)
    if reach != alive:
        raise RuntimeError(
            f"parts containing {format_mask(clique)} are not connected; invalid input"
        )
    while len(alive) > 2:
        leaves = [t for t in alive if degree[t] <= 1]
        for t in leaves:
            alive.discard(t)
            for u in hatted.neighbours[t]:
                if u in alive:
                    degree[u] -= 1
    if len(alive) == 1:
        return alive.pop()
    t, u = sorted(alive)
    pt, pu = hatted.parts[t], hatted.parts[u]
    if pu & ~pt == 0 and pt != pu:
        return t
    if pt & ~pu == 0 and pt != pu:
        return u
    raise RuntimeError(
        f"central edge parts {format_mask(pt)} and {format_mask(pu)} are not "
        "strictly comparable; input was not subdivided"
    )


@dataclass(frozen=True)
class GluePlan:
    """Host decomposition plus one torso decomposition per host node.

    Torso decompositions are expressed in host vertex coordinates and
    must each cover exactly their host part.
    """

    host: TreeDecomposition
    torso_decomps: tuple[TreeDecomposition, ...]

    def __post_init__(self) -> None:
        if len(self.torso_decomps) != self.host.node_count():
            raise ValueError(
                f"{self.host.node_count()} host nodes but "
                f"{len(self.torso_decomps)} torso decompositions"
            )


def trivial_decomposition(part: Mask) -> TreeDecomposition:
    return TreeDecomposition((part,), ())


def glue(g: Graph, plan: GluePlan) -> TreeDecomposition:
    """Assemble the glued decomposition of g from the plan."""
    host = plan.host
    for t, td_t in enumerate(plan.torso_decomps):
        h = torso(g, host, t)
        local = TreeDecomposition(
            tuple(h.local_mask(p) for p in td_t.parts), td_t.edges
        )
        report = validate(h.graph, local)
        if not report.ok():
            raise ValueError(
                f"torso decomposition at host node {t} invalid: {report.failures[0]}"
            )
    hats = [hat(td_t) for td_t in plan.torso_decomps]
    offsets = []
    total = 0
    for h in hats:
        offsets.append(total)
        total += h.node_count()
    parts: list[Mask] = []
    edges: list[tuple[int, int]] = []
    for h, off in zip(hats, offsets):
        parts.extend(h.parts)
        edges.extend((t + off, u + off) for t, u in h.edges)
    for t, u in host.edges:
        adh = host.parts[t] & host.parts[u]
        gt = canonical_node_for_clique(hats[t], adh) + offsets[t]
        gu = canonical_node_for_clique(hats[u], adh) + offsets[u]
        edges.append((gt, gu) if gt < gu else (gu, gt))
    out = TreeDecomposition(tuple(parts), tuple(sorted(edges)))
    report = validate(g, out, universe=host.cover())
    if not report.ok():
        raise RuntimeError(f"glued decomposition invalid: {report.failures[0]}")
    return out


def _rooted_form(td: TreeDecomposition, root: int, parent: int) -> tuple:
    children = sorted(
        _rooted_form(td, u, root)
        for u in td.neighbours[root]
        if u != parent
    )
    return (td.parts[root], tuple(children))


def labeled_tree_form(td: TreeDecomposition) -> tuple:
    """Canonical form of the part-labeled tree, up to isomorphism."""
    n = td.node_count()
    if n == 0:
        return ()
    alive = set(range(n))
    degree = [len(td.neighbours[t]) for t in range(n)]
    while len(alive) > 2:
        leaves = [t for t in alive if degree[t] <= 1]
        for t in leaves:
            alive.discard(t)
            for u in td.neighbours[t]:
                if u in alive:
                    degree[u] -= 1
    return min(_rooted_form(td, c, -1) for c in alive)


def tds_isomorphic(td1: TreeDecomposition, td2: TreeDecomposition) -> bool:
    """Part-labeled tree isomorphism."""
    return labeled_tree_form(td1) == labeled_tree_form(td2)


def map_decomposition(perm: tuple[int, ...], td: TreeDecomposition) -> TreeDecomposition:
    """Apply a vertex permutation to every part."""
    return TreeDecomposition(
        tuple(apply_perm_to_mask(perm, p) for p in td.parts), td.edges
    )


def _induces_torso_isomorphism(perm: tuple[int, ...], ht, hu) -> bool:
    if apply_perm_to_mask(perm, ht.part) != hu.part:
        return False
    for x in bits(ht.part):
        for y in bits(ht.part):
            if x >= y:
                continue
            lx, ly = ht.to_local[x], ht.to_local[y]
            mx, my = hu.to_local[perm[x]], hu.to_local[perm[y]]
            if ht.graph.has_edge(lx, ly) != hu.graph.has_edge(mx, my):
                return False
    return True


def is_canonical_family(g: Graph, plan: GluePlan) -> bool:
    """Canonicity of the torso-decomposition family.

    Each decomposition must be invariant under the automorphisms of its
    torso, and every graph automorphism carrying one torso onto a
    similar one must carry the decompositions onto each other.
    """
    host = plan.host
    torsos = [torso(g, host, t) for t in range(host.node_count())]
    locals_ = []
    for h, td_t in zip(torsos, plan.torso_decomps):
        locals_.append(
            TreeDecomposition(tuple(h.local_mask(p) for p in td_t.parts), td_t.edges)
        )
    # invariance composes, so the torso's generators are enough
    for h, local in zip(torsos, locals_):
        for psi in generating_permutations(h.graph):
            if not tds_isomorphic(local, map_decomposition(psi, local)):
                return False
    for phi in automorphisms(g):
        for t, ht in enumerate(torsos):
            for u, hu in enumerate(torsos):
                if t == u:
                    continue
                if not _induces_torso_isomorphism(phi, ht, hu):
                    continue
                mapped = map_decomposition(phi, plan.torso_decomps[t])
                if not tds_isomorphic(mapped, plan.torso_decomps[u]):
                    return False
    return True
