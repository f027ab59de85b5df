import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digraph_lab.digraph import build_digraph, disjoint_union
from digraph_lab.embed import (
    automorphism_count,
    count_subgraph_copies,
    disjoint_copy_lower_bound,
    edge_deletion_distance,
    greedy_disjoint_copies,
    is_embedding,
)
from digraph_lab.errors import PatternTooLarge
from digraph_lab.patterns import k_star
from digraph_lab.reduction import build_offline

from conftest import brute_force_embeddings
from test_digraph import digraphs


def test_pattern_in_itself(tri):
    assert automorphism_count(tri) == 1
    assert count_subgraph_copies(tri, tri) == 1


def test_sample_sequence_has_one_copy(tri, tri_dec, sample_seq):
    g = build_offline(sample_seq, tri_dec, seed=0)
    assert count_subgraph_copies(g, tri) == 1
    assert disjoint_copy_lower_bound(g, tri) == 1


def test_empty_host(tri):
    empty = build_digraph(7, 3, [])
    assert count_subgraph_copies(empty, tri) == 0
    assert disjoint_copy_lower_bound(empty, tri) == 0


def test_two_disjoint_copies(tri):
    assert disjoint_copy_lower_bound(disjoint_union(tri, tri), tri) == 2
    assert count_subgraph_copies(disjoint_union(tri, tri), tri) == 2


def test_star_copies_divide_by_automorphisms():
    star = k_star(2)
    assert automorphism_count(star) == 2
    # a center with three in-edges holds C(3,2) = 3 two-stars
    assert count_subgraph_copies(k_star(3), star) == 3


def test_pattern_limit():
    big = build_digraph(13, 1, [(i, i + 1) for i in range(1, 13)])
    with pytest.raises(PatternTooLarge):
        count_subgraph_copies(big, big)
    with pytest.raises(PatternTooLarge):
        disjoint_copy_lower_bound(big, big)


small_patterns = st.sampled_from(
    [
        k_star(2),
        k_star(3),
        build_digraph(3, 1, [(1, 2), (2, 3)]),
        build_digraph(3, 1, [(1, 2), (2, 3), (3, 1)]),
        build_digraph(3, 2, [(1, 2), (3, 2), (1, 3)]),
        build_digraph(4, 2, [(1, 2), (2, 1), (3, 2), (4, 3)]),
    ]
)


@settings(max_examples=80, deadline=None)
@given(digraphs(max_n=7), small_patterns)
def test_counts_match_permutation_oracle(g, h):
    emb = brute_force_embeddings(h, g)
    assert count_subgraph_copies(g, h) * automorphism_count(h) == emb
    assert (count_subgraph_copies(g, h) == 0) == (disjoint_copy_lower_bound(g, h) == 0)


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=7), small_patterns)
def test_counts_match_networkx_monomorphisms(g, h):
    G = nx.DiGraph(g.edges())
    G.add_nodes_from(range(1, g.n + 1))
    H = nx.DiGraph(h.edges())
    H.add_nodes_from(range(1, h.n + 1))
    matcher = nx.algorithms.isomorphism.DiGraphMatcher(G, H)
    expected = sum(1 for _ in matcher.subgraph_monomorphisms_iter())
    assert count_subgraph_copies(g, h) * automorphism_count(h) == expected


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=8), small_patterns)
def test_disjoint_copies_are_valid_and_bound_distance(g, h):
    copies = greedy_disjoint_copies(g, h)
    seen = set()
    for phi in copies:
        assert is_embedding(h, phi, g.has_edge)
        assert seen.isdisjoint(phi)
        seen.update(phi)
    if g.num_edges <= 12:
        dist = edge_deletion_distance(g, h)
        assert len(copies) <= dist
        assert (dist == 0) == (len(copies) == 0)
