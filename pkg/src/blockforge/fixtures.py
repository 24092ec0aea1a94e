"""Named example graphs and seeded random instances.

The named fixtures double as CLI inputs: ``blockforge decompose g_tri``
works without a file on disk.  Keys accept an optional ``.json`` suffix
so the same names can be used where a path is expected.
"""
from __future__ import annotations

import random
from itertools import combinations

from .graph_core import Graph


def _complete_edges(vertices: list[int]) -> list[tuple[int, int]]:
    return list(combinations(vertices, 2))


#: Path on three vertices, 0 - 1 - 2.  The smallest graph with a
#: proper separation; its only cut vertex is 1.
G_P3 = Graph.from_edges(3, [(0, 1), (1, 2)])

#: Complete graph on four vertices.  No proper separation of order
#: below 3, so every decomposition is the single part {0,1,2,3}.
G_K4 = Graph.from_edges(4, _complete_edges([0, 1, 2, 3]))

#: Three triangles sharing structure: {0,1,2} and {0,1,3} share the
#: edge 01, {0,4,5} hangs off vertex 0.  Six vertices, eight edges.
#: Decomposing at k=3 splits it into the three triangles plus a hub
#: part {0,1} keeping the tree canonical under the 2<->3 and 4<->5
#: symmetries.
G_TRI = Graph.from_edges(
    6,
    [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (0, 5), (4, 5)],
)

#: Two large overlapping cliques plus an apex: K7 on {0..6} and K7 on
#: {0,1,2,3,4,7,8} share the 5-clique {0..4}, and vertex 9 attaches to
#: 5, 6, 7, 8.  At k=5 the union of the cliques is an inseparable
#: 5-block whose displayed part has a highly symmetric torso; at
#: maximal robustness the two cliques separate and vertex 9 ends up in
#: both parts.
G_EX48 = Graph.from_edges(
    10,
    sorted(
        set(_complete_edges([0, 1, 2, 3, 4, 5, 6]))
        | set(_complete_edges([0, 1, 2, 3, 4, 7, 8]))
        | {(5, 9), (6, 9), (7, 9), (8, 9)}
    ),
)

FIXTURES: dict[str, Graph] = {
    "g_p3": G_P3,
    "g_k4": G_K4,
    "g_tri": G_TRI,
    "g_ex48": G_EX48,
}


def fixture(name: str) -> Graph:
    """Look up a named fixture; accepts an optional .json suffix."""
    key = name.removesuffix(".json")
    try:
        return FIXTURES[key]
    except KeyError:
        known = ", ".join(sorted(FIXTURES))
        raise KeyError(f"unknown fixture {name!r}; known fixtures: {known}") from None


def random_connected_graph(
    rng: random.Random,
    n: int,
    lo: float = 0.3,
    hi: float = 0.7,
) -> Graph:
    """Connected graph on n vertices with edge density drawn from [lo, hi].

    A random spanning tree guarantees connectivity; remaining pairs are
    kept independently with the drawn density.
    """
    if n < 1:
        raise ValueError(f"need at least one vertex, got {n}")
    edges: set[tuple[int, int]] = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u = order[rng.randrange(i)]
        v = order[i]
        edges.add((min(u, v), max(u, v)))
    density = rng.uniform(lo, hi)
    for pair in combinations(range(n), 2):
        if pair not in edges and rng.random() < density:
            edges.add(pair)
    return Graph.from_edges(n, sorted(edges))


def random_corpus(
    seed: int,
    instances: int,
    n_lo: int = 4,
    n_hi: int = 8,
    lo: float = 0.3,
    hi: float = 0.7,
) -> list[Graph]:
    """Deterministic list of random connected graphs for a given seed."""
    rng = random.Random(seed)
    return [
        random_connected_graph(rng, rng.randint(n_lo, n_hi), lo, hi)
        for _ in range(instances)
    ]
