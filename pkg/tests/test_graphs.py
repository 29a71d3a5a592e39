import random

import pytest

from tautring.graphs import (
    DomainError,
    StableGraph,
    automorphism_count,
    canonical,
    contract,
    decode_graph,
    enumerate_stable_graphs,
    isomorphisms,
    make_graph,
)


def loop_graph(n=1):
    return make_graph([0], [tuple(range(1, n + 1))], [(0, 0)])


def banana(legs_u, legs_v, edges=2, gu=0, gv=0):
    return make_graph([gu, gv], [legs_u, legs_v], [(0, 1)] * edges)


def test_validation_rejects_unstable():
    with pytest.raises(DomainError):
        make_graph([0], [(1, 2)], [])  # genus 0, valence 2
    with pytest.raises(DomainError):
        make_graph([0, 1], [(1,), ()], [])  # disconnected
    with pytest.raises(DomainError):
        make_graph([0], [(1, 3)], [])  # markings must be 1..n


def test_basic_invariants():
    G = loop_graph()
    assert G.genus() == 1
    assert G.h1 == 1
    assert G.num_edges == 1
    T = banana((1,), (2,))
    assert T.genus() == 1
    assert T.h1 == 1
    smooth = make_graph([2], [(1,)], [])
    assert smooth.genus() == 2
    assert smooth.is_smooth()


def test_automorphism_counts():
    assert automorphism_count(loop_graph()) == 2
    assert automorphism_count(make_graph([1], [(1,)], [])) == 1
    assert automorphism_count(banana((1,), (2,))) == 2
    # theta: two vertices joined by three parallel edges, no legs
    theta = make_graph([0, 0], [(), ()], [(0, 1)] * 3)
    assert automorphism_count(theta) == 12
    # two loops on one vertex
    two_loops = make_graph([0], [(1,)], [(0, 0), (0, 0)])
    assert automorphism_count(two_loops) == 8


def test_canonical_is_idempotent_and_label_invariant():
    rng = random.Random(20260816)
    pool = []
    for g, n, c in [(0, 4, 2), (1, 2, 2), (1, 3, 2), (2, 1, 3)]:
        pool.extend(enumerate_stable_graphs(g, n, c))
    for G in pool:
        C, _, _ = canonical(G)
        C2, _, _ = canonical(C)
        assert C == C2
        # rebuild under a random vertex permutation and edge flips
        nv = G.num_vertices
        perm = list(range(nv))
        rng.shuffle(perm)
        inv = [perm.index(v) for v in range(nv)]
        genera = [G.genera[inv[v]] for v in range(nv)]
        legs = [G.legs[inv[v]] for v in range(nv)]
        edges = []
        for u, v in G.edges:
            e = (perm[u], perm[v])
            if rng.random() < 0.5:
                e = (e[1], e[0])
            edges.append(e)
        rng.shuffle(edges)
        H = make_graph(genera, legs, edges)
        assert H == C


def one_edge_oracle(g, n):
    """Independent count of one-edge stable graphs of type (g, n)."""
    count = 1 if g >= 1 else 0  # nonseparating self-loop
    seen = set()
    markings = tuple(range(1, n + 1))
    for g1 in range(g + 1):
        for bits in range(1 << n):
            part = tuple(m for i, m in enumerate(markings) if bits >> i & 1)
            rest = tuple(m for m in markings if m not in part)
            g2 = g - g1
            if 2 * g1 - 2 + len(part) + 1 <= 0:
                continue
            if 2 * g2 - 2 + len(rest) + 1 <= 0:
                continue
            key = frozenset([(g1, part), (g2, rest)])
            seen.add(key)
    return count + len(seen)


@pytest.mark.parametrize("g,n", [(0, 4), (0, 5), (1, 1), (1, 2), (1, 3),
                                 (2, 1), (2, 2)])
def test_enumeration_codim_one_matches_oracle(g, n):
    graphs = enumerate_stable_graphs(g, n, 1)
    one_edge = [G for G in graphs if G.num_edges == 1]
    assert len(one_edge) == one_edge_oracle(g, n)
    smooth = [G for G in graphs if G.num_edges == 0]
    assert len(smooth) == 1


def test_enumeration_small_counts():
    assert len(enumerate_stable_graphs(1, 1, 1)) == 2
    assert len(enumerate_stable_graphs(0, 4, 1)) == 4
    # codim bound caps at the dimension
    assert enumerate_stable_graphs(1, 1, 5) == enumerate_stable_graphs(1, 1, 1)


@pytest.mark.parametrize("g,n,c", [(0, 5, 2), (1, 2, 3), (1, 3, 2), (2, 1, 3)])
def test_enumeration_closed_under_contraction(g, n, c):
    graphs = enumerate_stable_graphs(g, n, c)
    assert len(set(graphs)) == len(graphs)
    index = set(graphs)
    for G in graphs:
        assert G.genus() == g and G.num_legs == n
        assert G.num_edges <= min(c, 3 * g - 3 + n)
        for e in range(G.num_edges):
            H, _, _ = contract(G, frozenset({e}))
            C, _, _ = canonical(H)
            assert C in index


def test_contract_loop_and_separating_edge():
    G = loop_graph()
    H, vmap, hemap = contract(G, frozenset({0}))
    assert H.num_vertices == 1 and H.genera == (1,) and H.num_edges == 0
    assert vmap == (0,) and hemap == {}
    B = banana((1,), (2, 3), edges=1, gu=1, gv=0)
    with pytest.raises(DomainError):
        contract(B, frozenset({5}))


def test_encode_decode_round_trip():
    for g, n, c in [(0, 4, 1), (1, 2, 2), (2, 1, 3)]:
        for G in enumerate_stable_graphs(g, n, c):
            assert decode_graph(G.encode()) == G


def test_isomorphisms_respect_legs():
    A = banana((1,), (2,))
    B = banana((2,), (1,))
    maps = isomorphisms(A, B)
    assert maps
    C = banana((1, 2), (3,), gu=0, gv=1, edges=1)
    assert not isomorphisms(A, C)


def test_treelike_flags():
    assert loop_graph().is_treelike()
    assert not loop_graph().is_tree()
    assert banana((1,), (2,)).h1 == 1
    assert not banana((1,), (2,)).is_treelike()
    tree = banana((1, 2), (3,), edges=1, gu=0, gv=1)
    assert tree.is_tree() and tree.is_treelike()
