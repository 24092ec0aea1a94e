"""Exhaustive-scan machinery pinned against literal re-enumerations."""
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockforge.blocks_profiles import block_profile, k_blocks
from blockforge.enumeration import (
    CapExceededError,
    apply_perm_to_mask,
    apply_perm_to_separation,
    automorphisms,
    canonical_labeling,
    compose_perms,
    enumerate_separations,
    generating_permutations,
    get_cap,
    invert_perm,
    is_canonical_system,
    min_distinguisher_order,
    orbit_closure,
    set_cap,
)
from blockforge.fixtures import G_EX48, G_K4, G_P3, G_TRI, random_connected_graph
from blockforge.graph_core import Graph, Separation, mask_of
from helpers import A, C1, C2, K1, K2, X, Y, Z, sep
from oracles import (
    group_closure,
    literal_separations,
    permutation_automorphisms,
)

RIGID = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 3)])


def test_enumerate_separations_matches_literal_scan(small_corpus):
    for g in small_corpus:
        if g.n > 7:
            continue
        for k in (2, g.n):
            got = set(enumerate_separations(g, k))
            assert got == literal_separations(g, k)


def test_enumerate_separations_p3_proper_members():
    got = enumerate_separations(G_P3, 2)
    proper = {s for s in got if s.a & ~s.b and s.b & ~s.a}
    assert proper == {sep([0, 1], [1, 2]), sep([1, 2], [0, 1])}
    assert all(s.order() <= 1 for s in got)


def test_enumerate_separations_k4_has_no_proper_members():
    got = enumerate_separations(G_K4, 4)
    assert all(not (s.a & ~s.b) or not (s.b & ~s.a) for s in got)


def test_enumerate_separations_tri_order_one():
    got = enumerate_separations(G_TRI, 2)
    proper = {s for s in got if s.a & ~s.b and s.b & ~s.a}
    assert proper and all(s.separator() == 1 << Z for s in proper)
    assert sep([Z, C1, C2], [Z, A, X, Y]) in proper


def test_enumerate_separations_closed_under_inverse(small_corpus):
    for g in small_corpus[:10]:
        got = enumerate_separations(g, 3)
        assert all(s.inverse() in set(got) for s in got)


def test_cap_is_enforced_and_restorable():
    # scan results are cached per graph, so use one no other test touches
    fresh = Graph.from_edges(6, [(0, 5), (1, 5), (2, 5), (3, 5), (4, 5), (0, 4)])
    old = set_cap(5)
    try:
        with pytest.raises(CapExceededError):
            enumerate_separations(fresh, 2)
    finally:
        set_cap(old)
    assert get_cap() == old
    with pytest.raises(ValueError):
        set_cap(0)


def test_automorphisms_examples():
    assert len(automorphisms(G_P3)) == 2
    tri = automorphisms(G_TRI)
    assert len(tri) == 4
    swap_xy = (0, 1, 3, 2, 4, 5)
    swap_c = (0, 1, 2, 3, 5, 4)
    assert set(tri.permutations) == {
        (0, 1, 2, 3, 4, 5),
        swap_xy,
        swap_c,
        compose_perms(swap_xy, swap_c),
    }
    assert len(automorphisms(G_K4)) == 24
    assert automorphisms(RIGID).is_trivial()


def test_automorphisms_match_permutation_filter(small_corpus):
    for g in small_corpus:
        if g.n > 6:
            continue
        got = set(automorphisms(g).permutations)
        assert got == set(permutation_automorphisms(g))


def test_automorphisms_form_a_group(small_corpus):
    for g in small_corpus[:8]:
        perms = set(automorphisms(g).permutations)
        assert tuple(range(g.n)) in perms
        for p in perms:
            assert invert_perm(p) in perms
            for q in perms:
                assert compose_perms(p, q) in perms


def test_generating_permutations_span_the_group(small_corpus):
    for g in [G_P3, G_TRI, G_K4, G_EX48, RIGID, *small_corpus[:10]]:
        gens = generating_permutations(g)
        full = set(automorphisms(g).permutations)
        if len(full) == 1:
            assert gens == ()
        else:
            assert group_closure(list(gens)) == full


def test_canonical_labeling_is_isomorphism_invariant():
    rng = random.Random(7)
    for g in [G_TRI, G_P3, random_connected_graph(rng, 6)]:
        base = g.relabel(canonical_labeling(g))
        for _ in range(5):
            perm = list(range(g.n))
            rng.shuffle(perm)
            h = g.relabel(tuple(perm))
            assert h.relabel(canonical_labeling(h)) == base


def test_is_canonical_system_examples():
    closed = {sep([Z, C1, C2], [Z, A, X, Y]), sep([Z, A, X, Y], [Z, C1, C2])}
    assert is_canonical_system(G_TRI, closed)
    assert not is_canonical_system(G_P3, {sep([0, 1], [1, 2])})
    assert is_canonical_system(RIGID, {sep([0, 1, 2, 3], [3, 4, 5])})


def test_orbit_closure_properties():
    lone = (sep([Z, A, X], [Z, A, Y, C1, C2]),)
    closed = orbit_closure(G_TRI, lone)
    assert sep([Z, A, Y], [Z, A, X, C1, C2]) in closed
    assert is_canonical_system(G_TRI, closed)
    assert orbit_closure(G_TRI, closed) == closed
    rigid_sys = (sep([0, 1, 2, 3], [3, 4, 5]),)
    assert set(orbit_closure(RIGID, rigid_sys)) == set(rigid_sys)


def test_min_distinguisher_order_examples():
    blocks = {b.vertices: b for b in k_blocks(G_TRI, 3)}
    p_x = block_profile(G_TRI, mask_of([Z, A, X]), 3)
    p_y = block_profile(G_TRI, mask_of([Z, A, Y]), 3)
    p_c = block_profile(G_TRI, mask_of([Z, C1, C2]), 3)
    assert min_distinguisher_order(G_TRI, p_x.members, p_y.members) == 2
    assert min_distinguisher_order(G_TRI, p_x.members, p_c.members) == 1
    assert min_distinguisher_order(G_TRI, p_x.members, p_x.members) is None
    p_k1 = block_profile(G_EX48, K1, 7)
    p_k2 = block_profile(G_EX48, K2, 7)
    assert min_distinguisher_order(G_EX48, p_k1.members, p_k2.members) == 6


@given(
    st.integers(1, 10).flatmap(
        lambda n: st.tuples(
            st.permutations(range(n)), st.integers(0, (1 << n) - 1)
        )
    )
)
def test_apply_perm_to_mask_matches_naive(data):
    perm, mask = data
    perm = tuple(perm)
    naive = mask_of(perm[v] for v in range(len(perm)) if mask >> v & 1)
    assert apply_perm_to_mask(perm, mask) == naive


def test_apply_perm_to_separation():
    swap_xy = (0, 1, 3, 2, 4, 5)
    s = sep([Z, A, X], [Z, A, Y, C1, C2])
    assert apply_perm_to_separation(swap_xy, s) == sep([Z, A, Y], [Z, A, X, C1, C2])
