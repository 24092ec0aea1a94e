"""End-to-end acceptance gate.

Seven suites, each printing one visible PASS/FAIL line with its
runtime.  All expectations are exact (combinatorial, tolerance zero)
and rechecked with the brute-force oracles, never with the pipeline's
own self-reports alone.
"""
import time
from contextlib import contextmanager
from itertools import combinations

import pytest

from blockforge.blocks_profiles import (
    block_profile,
    enumerate_profiles,
    is_profile,
    is_r_robust,
    k_blocks,
    maximal_robust_profiles,
    s_blocks,
)
from blockforge.enumeration import apply_perm_to_separation
from blockforge.fixtures import G_EX48, G_TRI, random_corpus
from blockforge.focusing import build_from_almost_nested
from blockforge.gluing import map_decomposition, tds_isomorphic
from blockforge.graph_core import (
    Separation,
    corner_diagram,
    mask_of,
    nested_by_corners,
)
from blockforge.pipeline import (
    MAXIMAL_ROBUST,
    decompose,
    is_separable,
    s_of_blocks,
)
from blockforge.refine import induce_profile_on_torso, refine_nested
from blockforge.tree_decomp import (
    build_from_nested,
    induced_separation,
    induced_system,
    is_nested_system,
    torso,
    validate,
)

from fact_checks import FACT_CHECKS
from helpers import harvested_nested_system
from oracles import (
    group_closure,
    naive_k_blocks,
    naive_min_distinguisher_order,
    permutation_automorphisms,
)

SEED = 20260819

K1 = mask_of(range(7))
K2 = mask_of([0, 1, 2, 3, 4, 7, 8])
S5 = mask_of(range(5))
APEX = mask_of([5, 6, 7, 8, 9])


@pytest.fixture(scope="module")
def corpus():
    return random_corpus(SEED, 200, n_lo=4, n_hi=8)


@contextmanager
def announce(capsys, label, budget=None):
    t0 = time.time()
    status = "FAIL"
    try:
        yield
        elapsed = time.time() - t0
        if budget is not None:
            assert elapsed < budget, f"{label} took {elapsed:.1f}s, budget {budget}s"
        status = "PASS"
    finally:
        with capsys.disabled():
            print(f"\n[acceptance] {label}: {status} ({time.time() - t0:.1f}s)")


def oracle_group(g):
    return sorted(group_closure(permutation_automorphisms(g)))


def assert_guarantees(g, rep, profiles, group):
    """The oracle-side restatement of the headline promises."""
    td = rep.decomposition
    assert rep.all_pass()
    assert validate(g, td).ok()
    for phi in group:
        assert tds_isomorphic(map_decomposition(phi, td), td)
    induced = induced_system(td)
    for p, q in combinations(profiles, 2):
        d = naive_min_distinguisher_order(p.members, q.members)
        assert d is not None
        assert any(
            s.order() == d
            and (
                (s in p.members and s.inverse() in q.members)
                or (s in q.members and s.inverse() in p.members)
            )
            for s in induced
        )


def assert_block_displayed(td, block_mask):
    containing = {part for part in td.parts if block_mask & ~part == 0}
    assert containing == {block_mask}


def test_fixed_order_decompositions_on_random_corpus(corpus, capsys):
    with announce(capsys, "fixed-order suite, 200 graphs, every k", budget=900):
        for g in corpus:
            group = oracle_group(g)
            for k in range(2, g.n + 1):
                rep = decompose(g, k)
                assert td_adhesion_below(rep.decomposition, k)
                assert_guarantees(g, rep, enumerate_profiles(g, k), group)
                for bv in naive_k_blocks(g, k):
                    if is_separable(g, bv, k):
                        assert_block_displayed(rep.decomposition, bv)


def td_adhesion_below(td, k):
    return td.adhesion() < k


def test_maximal_robust_decompositions_on_random_corpus(corpus, capsys):
    with announce(capsys, "maximal-robust suite, 200 graphs", budget=900):
        for g in corpus:
            profiles = maximal_robust_profiles(g)
            rep = decompose(g, MAXIMAL_ROBUST)
            assert_guarantees(g, rep, profiles, oracle_group(g))
            for p in profiles:
                for b in k_blocks(g, p.k):
                    if block_profile(g, b.vertices, p.k) == p and is_separable(g, b):
                        assert_block_displayed(rep.decomposition, b.vertices)


def test_g_ex48_fixture_facts(capsys):
    with announce(capsys, "overlapping-cliques fixture", budget=60):
        g = G_EX48
        blocks5 = {b.vertices for b in k_blocks(g, 5)}
        assert blocks5 == {K1 | K2, APEX}
        assert all(is_separable(g, b) for b in k_blocks(g, 5))

        rep5 = decompose(g, 5)
        assert set(rep5.decomposition.parts) == {K1 | K2, APEX}
        (edge,) = rep5.decomposition.edges
        assert rep5.decomposition.adhesion_set(*edge) == mask_of([5, 6, 7, 8])

        blocks7 = {b.vertices for b in k_blocks(g, 7)}
        assert blocks7 == {K1, K2}
        assert not any(is_separable(g, b) for b in k_blocks(g, 7))

        p, q = (block_profile(g, b, 7) for b in (K1, K2))
        assert naive_min_distinguisher_order(p.members, q.members) == 6
        for mode in (7, MAXIMAL_ROBUST):
            rep = decompose(g, mode)
            hits = [
                s
                for s in induced_system(rep.decomposition)
                if s in p.members and s.inverse() in q.members
            ]
            assert hits and min(s.order() for s in hits) == 6

        v9 = 1 << 9
        u = Separation(K1 | v9, K2 | v9)
        w = Separation(APEX | v9, K1 | K2)
        assert not nested_by_corners(u, w)
        # the link on the K1|K2 side is the shared 5-clique
        assert corner_diagram(u, w).links["D"] == S5


def test_g_tri_fixture_three_triangles(capsys):
    with announce(capsys, "three-triangles fixture", budget=5):
        rep = decompose(G_TRI, 3)
        td = rep.decomposition
        non_hub = [td.parts[t] for t in range(td.node_count()) if not td.is_hub_node(t)]
        assert sorted(non_hub) == sorted(
            (mask_of([0, 1, 2]), mask_of([0, 1, 3]), mask_of([0, 4, 5]))
        )
        group = oracle_group(G_TRI)
        assert len(group) == 4
        for phi in group:
            assert tds_isomorphic(map_decomposition(phi, td), td)


def test_separation_facts_zero_violations(corpus, capsys):
    with announce(capsys, "separation-fact sweeps, corpus below n=7"):
        small = [g for g in corpus if g.n <= 6]
        assert len(small) > 50
        for name, fn in FACT_CHECKS.items():
            witnesses = []
            cases = 0
            for g in small:
                w, c = fn(g)
                witnesses += w
                cases += c
            assert witnesses == [], f"{name}: {witnesses[:3]}"
            if name != "crossing-members-resolve":
                assert cases > 0, name


def test_nested_system_round_trip(corpus, capsys):
    with announce(capsys, "nested-system round trips, 100 systems", budget=120):
        done = 0
        for g in corpus:
            if done == 100:
                break
            done += 1
            td0, system = harvested_nested_system(g)
            assert validate(g, td0).ok()
            td = build_from_nested(g, system)
            assert validate(g, td).ok()
            assert set(induced_system(td)) == set(system)
            oriented = [
                induced_separation(td, t, u)
                for edge in td.edges
                for t, u in (edge, edge[::-1])
            ]
            assert len(oriented) == len(set(oriented))
            blocks = {b.vertices for b in s_blocks(g, set(system))}
            for b in blocks:
                assert b in td.parts
            for t, part in enumerate(td.parts):
                assert part in blocks or td.is_hub_node(t)
        assert done == 100


def test_refinement_guarantees(corpus, capsys):
    with announce(capsys, "refinement suite, 200 graphs, every k"):
        for g in corpus:
            group = oracle_group(g)
            for k in range(2, g.n + 1):
                profiles = enumerate_profiles(g, k)
                if not profiles:
                    continue
                backing = [
                    b
                    for b in k_blocks(g, k)
                    if block_profile(g, b.vertices, k) in set(profiles)
                ]
                scaffold = build_from_almost_nested(g, s_of_blocks(g, backing))
                base = tuple(
                    s for s in induced_system(scaffold) if s.a != g.full_mask
                )
                refined = refine_nested(g, base, profiles)
                assert set(base) <= set(refined)
                assert is_nested_system(refined)
                for p, q in combinations(profiles, 2):
                    d = naive_min_distinguisher_order(p.members, q.members)
                    assert d is not None
                    assert any(
                        s.order() == d
                        and (
                            (s in p.members and s.inverse() in q.members)
                            or (s in q.members and s.inverse() in p.members)
                        )
                        for s in refined
                    )
                for phi in group:
                    assert {apply_perm_to_separation(phi, s) for s in base} == set(
                        base
                    )
                    assert {apply_perm_to_separation(phi, s) for s in refined} == set(
                        refined
                    )


def test_torso_profiles_axioms_and_robustness(corpus, capsys):
    with announce(capsys, "torso-profile axioms and robustness transfer"):
        for g in corpus[:100]:
            td, _ = harvested_nested_system(g)
            for k in (2, 3):
                if k > g.n:
                    continue
                for q in enumerate_profiles(g, k):
                    for t in range(td.node_count()):
                        tp = induce_profile_on_torso(g, td, t, q)
                        tor = torso(g, td, t)
                        assert is_profile(
                            tor.graph, tp.torso_profile.members, tp.torso_profile.k
                        )
                        for r in range(k):
                            if is_r_robust(g, q, r):
                                assert is_r_robust(tor.graph, tp.torso_profile, r)
