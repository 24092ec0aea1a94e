"""Shared test utilities: separation literals, fixture vertex names, DOT parsing."""
from __future__ import annotations

import re
from typing import Iterable

from blockforge.graph_core import Separation, mask_of

# g_tri vertex names: hub z, shared apex a, the swappable pairs x/y and c1/c2
Z, A, X, Y, C1, C2 = 0, 1, 2, 3, 4, 5

# g_ex48 vertex names: two overlapping cliques, their private pairs, the apex v
K1 = mask_of(range(7))
K2 = mask_of([0, 1, 2, 3, 4, 7, 8])
S5 = mask_of(range(5))
A1, A2, B1, B2, V9 = 5, 6, 7, 8, 9


def sep(a_vertices: Iterable[int], b_vertices: Iterable[int]) -> Separation:
    return Separation(mask_of(a_vertices), mask_of(b_vertices))


def symmetric(*seps: Separation) -> set[Separation]:
    out = set()
    for s in seps:
        out.add(s)
        out.add(Separation(s.b, s.a))
    return out


def harvested_nested_system(g):
    """A nested proper system read off an externally built decomposition.

    networkx's min-fill-in heuristic yields a valid tree-decomposition
    with no help from this package, so systems induced by it make
    unbiased round-trip inputs.
    """
    import networkx as nx
    from networkx.algorithms.approximation import treewidth_min_fill_in

    from blockforge.graph_core import is_proper
    from blockforge.tree_decomp import TreeDecomposition, induced_system

    gx = nx.Graph()
    gx.add_nodes_from(range(g.n))
    gx.add_edges_from(g.edges)
    _, tree = treewidth_min_fill_in(gx)
    bags = list(tree.nodes)
    index = {bag: i for i, bag in enumerate(bags)}
    td = TreeDecomposition(
        parts=tuple(mask_of(bag) for bag in bags),
        edges=tuple((index[u], index[v]) for u, v in tree.edges),
    )
    return td, tuple(s for s in induced_system(td) if is_proper(s))


_TOKEN = re.compile(
    r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<id>[A-Za-z0-9_.]+)|(?P<sym>--|[{}\[\];,=]))'
)


def _tokenize_dot(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise SyntaxError(f"bad DOT at offset {pos}: {text[pos:pos + 20]!r}")
            break
        tokens.append(m.group("str") or m.group("id") or m.group("sym"))
        pos = m.end()
    return tokens


def parse_dot(text: str) -> tuple[str, dict[str, dict], list[tuple[str, str, dict]]]:
    """Strict parser for the emitted graphviz subset.

    Grammar: graph NAME { stmt* } with stmt one of
      ID [attrs];        node (or node-defaults when ID is "node")
      ID -- ID [attrs];  edge
    Raises SyntaxError on anything malformed; returns (name, nodes, edges).
    """
    tokens = _tokenize_dot(text)
    pos = 0

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise SyntaxError("unexpected end of DOT input")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise SyntaxError(f"expected {expected!r}, got {tok!r}")
        pos += 1
        return tok

    def attrs() -> dict:
        out: dict[str, str] = {}
        if pos < len(tokens) and tokens[pos] == "[":
            take("[")
            while True:
                key = take()
                take("=")
                value = take()
                if value.startswith('"'):
                    value = value[1:-1]
                out[key] = value
                if tokens[pos] == ",":
                    take(",")
                    continue
                break
            take("]")
        return out

    take("graph")
    name = take()
    take("{")
    nodes: dict[str, dict] = {}
    edges: list[tuple[str, str, dict]] = []
    while tokens[pos] != "}":
        first = take()
        if tokens[pos] == "--":
            take("--")
            second = take()
            edges.append((first, second, attrs()))
        else:
            a = attrs()
            if first != "node":
                nodes[first] = a
        take(";")
    take("}")
    if pos != len(tokens):
        raise SyntaxError("trailing tokens after closing brace")
    return name, nodes, edges
