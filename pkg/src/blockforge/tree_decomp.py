"""Tree-decompositions, torsos, induced separations, and the tree T(N)
built from a nested separation system.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .blocks_profiles import s_blocks
from .enumeration import SeparationSystem
from .graph_core import (
    Graph,
    Mask,
    Separation,
    bit_list,
    bits,
    format_mask,
    format_separation,
    is_proper,
    is_separation,
    nested,
    separates,
)


@dataclass(frozen=True)
class TreeDecomposition:
    """Tree over node ids 0..len(parts)-1 with a part per node."""

    parts: tuple[Mask, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        n = len(self.parts)
        seen = set()
        for t, u in self.edges:
            if not (0 <= t < n and 0 <= u < n):
                raise ValueError(f"tree edge ({t}, {u}) out of range")
            if t == u:
                raise ValueError(f"tree self-loop at node {t}")
            key = (t, u) if t < u else (u, t)
            if key in seen:
                raise ValueError(f"duplicate tree edge ({t}, {u})")
            seen.add(key)

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in self.parts]
        for t, u in self.edges:
            nbrs[t].append(u)
            nbrs[u].append(t)
        return tuple(tuple(sorted(ns)) for ns in nbrs)

    def node_count(self) -> int:
        return len(self.parts)

    def is_tree(self) -> bool:
        n = len(self.parts)
        if len(self.edges) != n - 1 or n == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            for u in self.neighbours[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == n

    def adhesion_set(self, t: int, u: int) -> Mask:
        if u not in self.neighbours[t]:
            raise ValueError(f"({t}, {u}) is not a tree edge")
        return self.parts[t] & self.parts[u]

    def adhesion(self) -> int:
        return max(
            ((self.parts[t] & self.parts[u]).bit_count() for t, u in self.edges),
            default=0,
        )

    def is_hub_node(self, t: int) -> bool:
        """A part contained in some neighbour's part."""
        pt = self.parts[t]
        return any(pt & ~self.parts[u] == 0 for u in self.neighbours[t])

    def side_nodes(self, t: int, u: int) -> frozenset[int]:
        """Nodes in the component of the tree minus edge (t,u) containing t."""
        if u not in self.neighbours[t]:
            raise ValueError(f"({t}, {u}) is not a tree edge")
        seen = {t}
        stack = [t]
        while stack:
            for w in self.neighbours[stack.pop()]:
                if w != u and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    def cover(self) -> Mask:
        out = 0
        for p in self.parts:
            out |= p
        return out


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[str, ...]

    def ok(self) -> bool:
        return not self.failures


def validate(g: Graph, td: TreeDecomposition, universe: Mask | None = None) -> ValidationReport:
    """Check the three tree-decomposition axioms, with witnesses."""
    uni = g.full_mask if universe is None else universe
    fails: list[str] = []
    if not td.is_tree():
        fails.append(
            f"not a tree: {td.node_count()} nodes, {len(td.edges)} edges or disconnected"
        )
        return ValidationReport(tuple(fails))
    covered = td.cover()
    if covered != uni:
        missing = uni & ~covered
        fails.append(f"vertices not covered by any part: {format_mask(missing)}")
    for u, v in sorted(g.edges):
        if not (uni >> u & 1 and uni >> v & 1):
            continue
        e = (1 << u) | (1 << v)
        if not any(e & ~p == 0 for p in td.parts):
            fails.append(f"edge ({u}, {v}) inside no part")
    for v in bits(uni):
        holders = [t for t, p in enumerate(td.parts) if p >> v & 1]
        if not holders:
            continue
        seen = {holders[0]}
        stack = [holders[0]]
        holder_set = set(holders)
        while stack:
            for w in td.neighbours[stack.pop()]:
                if w in holder_set and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != holder_set:
            fails.append(f"nodes holding vertex {v} induce a disconnected subtree")
    return ValidationReport(tuple(fails))


@dataclass(frozen=True)
class Torso:
    """Torso graph of one part, densely relabeled, with its embedding."""

    graph: Graph
    embedding: tuple[int, ...]
    node: int
    part: Mask

    @cached_property
    def to_local(self) -> dict[int, int]:
        return {host: i for i, host in enumerate(self.embedding)}

    def local_mask(self, host_mask: Mask) -> Mask:
        out = 0
        for v in bits(host_mask & self.part):
            out |= 1 << self.to_local[v]
        return out

    def host_mask(self, local_mask: Mask) -> Mask:
        out = 0
        for i in bits(local_mask):
            out |= 1 << self.embedding[i]
        return out

    def local_separation(self, s: Separation) -> Separation:
        return Separation(self.local_mask(s.a), self.local_mask(s.b))

    def host_separation(self, s: Separation) -> Separation:
        return Separation(self.host_mask(s.a), self.host_mask(s.b))


def torso(g: Graph, td: TreeDecomposition, t: int) -> Torso:
    """G restricted to part t plus clique fill-ins on its adhesion sets."""
    part = td.parts[t]
    embedding = tuple(bits(part))
    local = {host: i for i, host in enumerate(embedding)}
    edges = {
        (local[u], local[v]) for u, v in g.edges_within(part)
    }
    for u in td.neighbours[t]:
        adh = bit_list(part & td.parts[u])
        for i, x in enumerate(adh):
            for y in adh[i + 1:]:
                a, b = local[x], local[y]
                edges.add((a, b) if a < b else (b, a))
    return Torso(Graph(len(embedding), frozenset(edges)), embedding, t, part)


def induced_separation(td: TreeDecomposition, t: int, u: int) -> Separation:
    """Separation induced by the oriented tree edge (t, u): t's side first."""
    t_side = td.side_nodes(t, u)
    a = 0
    b = 0
    for w, p in enumerate(td.parts):
        if w in t_side:
            a |= p
        else:
            b |= p
    return Separation(a, b)


def induced_system(td: TreeDecomposition) -> SeparationSystem:
    """All separations induced by oriented tree edges, deduplicated."""
    out = set()
    for t, u in td.edges:
        s = induced_separation(td, t, u)
        out.add(s)
        out.add(s.inverse())
    return tuple(sorted(out, key=Separation.sort_key))


class TorsoInductionError(ValueError):
    """A separation does not induce one on the requested torso."""


def induces_on_torso(
    g: Graph, td: TreeDecomposition, s: Separation, t: int
) -> Separation:
    """(A cap P_t, B cap P_t) in host coordinates, when well-defined."""
    part = td.parts[t]
    if s.separator() & ~part:
        raise TorsoInductionError(
            f"separator {format_mask(s.separator())} leaves part {format_mask(part)}"
        )
    for u in td.neighbours[t]:
        adh = part & td.parts[u]
        if separates(s, adh):
            raise TorsoInductionError(
                f"{format_separation(s)} separates adhesion set {format_mask(adh)}"
            )
    restricted = Separation(s.a & part, s.b & part)
    h = torso(g, td, t)
    if not is_separation(h.graph, h.local_separation(restricted)):
        raise TorsoInductionError(
            f"{format_separation(restricted)} is not a separation of the torso"
        )
    return restricted


def is_nested_system(seps: Iterable[Separation]) -> bool:
    return crossing_witness(seps) is None


def crossing_witness(
    seps: Iterable[Separation],
) -> tuple[Separation, Separation] | None:
    items = sorted(set(seps), key=Separation.sort_key)
    for i, s in enumerate(items):
        for u in items[i + 1:]:
            if not nested(s, u):
                return (s, u)
    return None


def build_from_nested(
    g: Graph, system: Iterable[Separation], universe: Mask | None = None
) -> TreeDecomposition:
    """The tree-decomposition T(N) of a nested symmetric proper system.

    Nodes are the consistent orientations of the system; the part of an
    orientation is the intersection of its chosen far sides; two nodes
    are adjacent when they differ on exactly one underlying pair.  The
    construction promises: (i) every N-block is a part, (ii) every part
    is an N-block or a hub, (iii) the induced separations are exactly N,
    (iv) each member is induced by exactly one oriented edge.  All four
    are asserted before returning.
    """
    uni = g.full_mask if universe is None else universe
    members = sorted(set(system), key=Separation.sort_key)
    memset = set(members)
    for s in members:
        if s.inverse() not in memset:
            raise ValueError(f"system not symmetric: missing inverse of {format_separation(s)}")
        if not is_proper(s):
            raise ValueError(
                f"system contains improper member {format_separation(s)}; "
                "orientations cannot tree-ify it"
            )
    witness = crossing_witness(members)
    if witness is not None:
        raise ValueError(
            f"system not nested: {format_separation(witness[0])} crosses "
            f"{format_separation(witness[1])}"
        )
    reps = sorted(
        (s for s in members if (s.a, s.b) < (s.b, s.a)), key=Separation.sort_key
    )
    p = len(reps)

    orientations: list[tuple[int, Mask]] = []
    chosen: list[Separation] = []

    def extend(i: int, vector: int, part: Mask) -> None:
        if i == p:
            orientations.append((vector, part))
            return
        rep = reps[i]
        for bit, u in ((0, rep), (1, rep.inverse())):
            ok = True
            for s in chosen:
                # consistency: u.inverse() <= s would force the unchosen side
                if (u.b & ~s.a) == 0 and (s.b & ~u.a) == 0:
                    ok = False
                    break
            if ok:
                chosen.append(u)
                extend(i + 1, vector | (bit << i), part & u.b)
                chosen.pop()

    extend(0, 0, uni)

    orientations.sort(key=lambda ov: (ov[1], ov[0]))
    parts = tuple(part for _, part in orientations)
    index = {vector: i for i, (vector, _) in enumerate(orientations)}
    edges = []
    for vector, _ in orientations:
        for i in range(p):
            other = vector ^ (1 << i)
            j = index.get(other)
            if j is not None and index[vector] < j:
                edges.append((index[vector], j))
    td = TreeDecomposition(parts, tuple(sorted(edges)))

    if not td.is_tree():
        raise RuntimeError(
            "construction bug: consistent orientations did not form a tree "
            f"({td.node_count()} nodes, {len(td.edges)} edges)"
        )
    _assert_tree_from_nested(g, td, tuple(members), uni)
    return td


def _assert_tree_from_nested(
    g: Graph, td: TreeDecomposition, members: SeparationSystem, uni: Mask
) -> None:
    part_set = set(td.parts)
    blocks = {b.vertices for b in s_blocks(g, members, uni)}
    for b in blocks:
        if b not in part_set:
            raise RuntimeError(
                f"construction bug: block {format_mask(b)} is not a part"
            )
    for t, part in enumerate(td.parts):
        if part not in blocks and not td.is_hub_node(t):
            raise RuntimeError(
                f"construction bug: part {format_mask(part)} is neither a block nor a hub"
            )
    memset = set(members)
    induced_count: dict[Separation, int] = {}
    for t, u in td.edges:
        s = induced_separation(td, t, u)
        induced_count[s] = induced_count.get(s, 0) + 1
        induced_count[s.inverse()] = induced_count.get(s.inverse(), 0) + 1
    if set(induced_count) != memset:
        raise RuntimeError(
            "construction bug: induced system differs from the input system"
        )
    for s, c in induced_count.items():
        if c != 1:
            raise RuntimeError(
                f"construction bug: {format_separation(s)} induced by {c} oriented edges"
            )


def td_to_obj(td: TreeDecomposition) -> dict:
    return {
        "nodes": [
            {"id": t, "part": bit_list(p)} for t, p in enumerate(td.parts)
        ],
        "edges": [[t, u] for t, u in sorted(td.edges)],
    }


def td_from_obj(obj: dict) -> TreeDecomposition:
    nodes = obj["nodes"]
    ids = [entry["id"] for entry in nodes]
    if sorted(ids) != list(range(len(nodes))):
        raise ValueError("node ids must be 0..n-1")
    parts = [0] * len(nodes)
    for entry in nodes:
        m = 0
        for v in entry["part"]:
            m |= 1 << v
        parts[entry["id"]] = m
    edges = tuple(
        (t, u) if t < u else (u, t) for t, u in obj["edges"]
    )
    return TreeDecomposition(tuple(parts), edges)


def to_dot(td: TreeDecomposition) -> str:
    """Graphviz text: parts as labels, hub nodes dashed, adhesion edge labels."""
    lines = ["graph tree_decomposition {", "  node [shape=box];"]
    for t, p in enumerate(td.parts):
        style = ", style=dashed" if td.is_hub_node(t) else ""
        lines.append(f'  t{t} [label="{format_mask(p)}"{style}];')
    for t, u in sorted(td.edges):
        adh = format_mask(td.parts[t] & td.parts[u])
        lines.append(f'  t{t} -- t{u} [label="{adh}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
