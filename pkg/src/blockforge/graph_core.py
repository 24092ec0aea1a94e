"""Graphs, vertex-set bitmasks and separations.

Vertices of a graph on n vertices are the integers 0..n-1.  A set of
vertices is an int bitmask (bit v set <=> vertex v in the set), so set
algebra is plain integer arithmetic and every value is hashable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

Mask = int


def mask_of(vertices: Iterable[int]) -> Mask:
    """Bitmask for an iterable of vertex ids."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: Mask) -> Iterator[int]:
    """Iterate the vertex ids in a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bit_list(mask: Mask) -> list[int]:
    return list(bits(mask))


def submasks(mask: Mask) -> Iterator[Mask]:
    """All subsets of a mask, including 0 and the mask itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class GraphParseError(ValueError):
    """Input rejected; the message carries the offending position."""


def _check_edge(n: int, u: object, v: object, where: str) -> tuple[int, int]:
    if not isinstance(u, int) or not isinstance(v, int) or isinstance(u, bool) or isinstance(v, bool):
        raise GraphParseError(f"{where}: endpoints must be integers, got ({u!r}, {v!r})")
    if u == v:
        raise GraphParseError(f"{where}: self-loop ({u}, {v})")
    if not (0 <= u < n and 0 <= v < n):
        raise GraphParseError(f"{where}: endpoint out of range for n={n}: ({u}, {v})")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Finite simple graph with vertex set 0..n-1.

    Edges are stored as (u, v) tuples with u < v.  Instances are
    immutable and hashable so per-graph computations can be cached.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u}, {v})")
            norm.add((u, v) if u < v else (v, u))
        return Graph(n, frozenset(norm))

    @cached_property
    def full_mask(self) -> Mask:
        return (1 << self.n) - 1

    @cached_property
    def adj(self) -> tuple[Mask, ...]:
        """Neighbourhood mask per vertex."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbourhood(self, mask: Mask) -> Mask:
        """N(X): vertices outside mask with a neighbour inside it."""
        out = 0
        for v in bits(mask):
            out |= self.adj[v]
        return out & ~mask

    def components(self, within: Mask | None = None) -> tuple[Mask, ...]:
        """Connected components of the subgraph induced on ``within``."""
        left = self.full_mask if within is None else within
        comps = []
        while left:
            seed = left & -left
            comp = seed
            frontier = seed
            while frontier:
                grow = 0
                for v in bits(frontier):
                    grow |= self.adj[v]
                grow &= left & ~comp
                comp |= grow
                frontier = grow
            comps.append(comp)
            left &= ~comp
        return tuple(sorted(comps))

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return len(self.components()) == 1

    def edges_within(self, mask: Mask) -> tuple[tuple[int, int], ...]:
        return tuple(
            (u, v) for u, v in sorted(self.edges) if mask >> u & 1 and mask >> v & 1
        )

    def relabel(self, perm: tuple[int, ...]) -> "Graph":
        """Image graph under the vertex map v -> perm[v]."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def to_json(self) -> str:
        payload = {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}
        return json.dumps(payload, indent=2) + "\n"


def parse_graph_json(text: str) -> Graph:
    """Parse {"n": int, "edges": [[u, v], ...]}; rejects malformed input."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(payload, dict):
        raise GraphParseError("top-level JSON value must be an object")
    extra = sorted(set(payload) - {"n", "edges"})
    if extra:
        raise GraphParseError(f"unknown keys: {', '.join(extra)}")
    if "n" not in payload or "edges" not in payload:
        raise GraphParseError('both "n" and "edges" are required')
    n = payload["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphParseError(f'"n" must be a positive integer, got {n!r}')
    raw_edges = payload["edges"]
    if not isinstance(raw_edges, list):
        raise GraphParseError('"edges" must be a list of [u, v] pairs')
    seen: set[tuple[int, int]] = set()
    for i, item in enumerate(raw_edges):
        where = f"edge #{i}"
        if not isinstance(item, list) or len(item) != 2:
            raise GraphParseError(f"{where}: expected a pair [u, v], got {item!r}")
        edge = _check_edge(n, item[0], item[1], where)
        if edge in seen:
            raise GraphParseError(f"{where}: duplicate edge ({item[0]}, {item[1]})")
        seen.add(edge)
    return Graph(n, frozenset(seen))


def parse_graph_text(text: str) -> Graph:
    """Parse whitespace edge-list text: header line "n m", then m lines "u v"."""
    lines = text.splitlines()
    stripped = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    content = [(no, ln) for no, ln in stripped if ln and not ln.startswith("#")]
    if not content:
        raise GraphParseError("empty input: expected a header line 'n m'")
    head_no, head = content[0]
    fields = head.split()
    if len(fields) != 2:
        raise GraphParseError(f"line {head_no}: header must be 'n m', got {head!r}")
    try:
        n, m = int(fields[0]), int(fields[1])
    except ValueError:
        raise GraphParseError(f"line {head_no}: header must hold two integers, got {head!r}") from None
    if n < 1:
        raise GraphParseError(f"line {head_no}: vertex count must be positive, got {n}")
    if m < 0:
        raise GraphParseError(f"line {head_no}: edge count must be non-negative, got {m}")
    body = content[1:]
    if len(body) != m:
        raise GraphParseError(f"header declares {m} edges but {len(body)} edge lines found")
    seen: set[tuple[int, int]] = set()
    for no, ln in body:
        fields = ln.split()
        if len(fields) != 2:
            raise GraphParseError(f"line {no}: expected 'u v', got {ln!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError(f"line {no}: endpoints must be integers, got {ln!r}") from None
        edge = _check_edge(n, u, v, f"line {no}")
        if edge in seen:
            raise GraphParseError(f"line {no}: duplicate edge ({u}, {v})")
        seen.add(edge)
    return Graph(n, frozenset(seen))


class Separation(NamedTuple):
    """Ordered separation (A, B), both sides as masks."""

    a: Mask
    b: Mask

    def inverse(self) -> "Separation":
        return Separation(self.b, self.a)

    def separator(self) -> Mask:
        return self.a & self.b

    def order(self) -> int:
        return (self.a & self.b).bit_count()

    def sort_key(self) -> tuple[int, int, int]:
        return ((self.a & self.b).bit_count(), self.a, self.b)


def is_separation(g: Graph, s: Separation) -> bool:
    """True iff A and B cover V and no edge joins A\\B to B\\A."""
    if s.a | s.b != g.full_mask:
        return False
    only_a = s.a & ~s.b
    only_b = s.b & ~s.a
    for v in bits(only_a):
        if g.adj[v] & only_b:
            return False
    return True


def make_separation(g: Graph, a: Mask, b: Mask) -> Separation:
    s = Separation(a, b)
    if not is_separation(g, s):
        raise ValueError(f"({bit_list(a)}, {bit_list(b)}) is not a separation")
    return s


def is_proper(s: Separation) -> bool:
    """Proper: neither side contains the other."""
    return bool(s.a & ~s.b) and bool(s.b & ~s.a)


def is_tight(g: Graph, s: Separation) -> bool:
    """Every separator vertex has a neighbour in both strict sides."""
    only_a = s.a & ~s.b
    only_b = s.b & ~s.a
    for v in bits(s.a & s.b):
        if not (g.adj[v] & only_a) or not (g.adj[v] & only_b):
            return False
    return True


def leq(s: Separation, t: Separation) -> bool:
    """(A,B) <= (C,D)  iff  A subset of C and D subset of B."""
    return (s.a & ~t.a) == 0 and (t.b & ~s.b) == 0


def nested(s: Separation, t: Separation) -> bool:
    """Nested: s is <=-comparable with t or with t's inverse."""
    sa, sb = s
    ta, tb = t
    if (sa & ~ta) == 0 and (tb & ~sb) == 0:
        return True
    if (ta & ~sa) == 0 and (sb & ~tb) == 0:
        return True
    if (sa & ~tb) == 0 and (ta & ~sb) == 0:
        return True
    if (tb & ~sa) == 0 and (sb & ~ta) == 0:
        return True
    return False


def crossing(s: Separation, t: Separation) -> bool:
    return not nested(s, t)


_CORNERS = (("A", "C"), ("A", "D"), ("B", "C"), ("B", "D"))


@dataclass(frozen=True)
class CornerDiagram:
    """Cross-diagram of two separations: center, corner interiors, links."""

    center: Mask
    interiors: dict[tuple[str, str], Mask]
    links: dict[str, Mask]

    def corner_empty(self, corner: tuple[str, str]) -> bool:
        x, y = corner
        return self.interiors[corner] == 0 and self.links[x] == 0 and self.links[y] == 0


def corner_diagram(s: Separation, t: Separation) -> CornerDiagram:
    """Center, interiors and links for the pair; rejects (V, V) inputs."""
    full = s.a | s.b
    if s.a == full and s.b == full:
        raise ValueError("corner diagram undefined for (V, V)")
    if t.a == full and t.b == full:
        raise ValueError("corner diagram undefined for (V, V)")
    sides = {"A": s.a, "B": s.b, "C": t.a, "D": t.b}
    other = {"A": "B", "B": "A", "C": "D", "D": "C"}
    center = s.a & s.b & t.a & t.b
    interiors = {}
    for x, y in _CORNERS:
        interiors[(x, y)] = sides[x] & sides[y] & ~sides[other[x]] & ~sides[other[y]]
    links = {}
    for x in ("A", "B"):
        links[x] = (sides[x] & t.a & t.b) & ~center
    for y in ("C", "D"):
        links[y] = (sides[y] & s.a & s.b) & ~center
    return CornerDiagram(center, interiors, links)


def nested_by_corners(s: Separation, t: Separation) -> bool:
    """Corner characterisation of nestedness (independent of leq-based nested)."""
    diagram = corner_diagram(s, t)
    return any(diagram.corner_empty(c) for c in _CORNERS)


def corner_separation(s: Separation, t: Separation, corner: tuple[str, str]) -> Separation:
    """The separation (X cap Y, Xbar cup Ybar) for a corner (X, Y) of the pair."""
    if corner not in _CORNERS:
        raise ValueError(f"bad corner {corner!r}")
    sides = {"A": s.a, "B": s.b, "C": t.a, "D": t.b}
    other = {"A": "B", "B": "A", "C": "D", "D": "C"}
    x, y = corner
    return Separation(sides[x] & sides[y], sides[other[x]] | sides[other[y]])


def restrict(s: Separation, x: Mask) -> Separation:
    """Restriction (A cap X, B cap X); a separation of the induced subgraph."""
    return Separation(s.a & x, s.b & x)


def separates(s: Separation, x: Mask) -> bool:
    """True iff x meets both strict sides of s."""
    return bool(x & s.a & ~s.b) and bool(x & s.b & ~s.a)


def format_mask(mask: Mask) -> str:
    return "{" + ",".join(str(v) for v in bits(mask)) + "}"


def format_separation(s: Separation) -> str:
    return f"({format_mask(s.a)}, {format_mask(s.b)})"
