from collections import Counter
from fractions import Fraction as F

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import DiGraphMatcher

from digraph_lab.embed import count_subgraph_copies, disjoint_copy_lower_bound
from digraph_lab.errors import BadVertexIndex, OccurrenceCapExceeded, ValueOutOfRange
from digraph_lab.occurrence import IntSequence, build_family, occurrence_farness
from digraph_lab.patterns import k_star, prepare_pattern
from digraph_lab.reduction import (
    ReducedIndexing,
    ReductionOracle,
    SequenceAccess,
    assign_types,
    build_offline,
    consistency_check,
    distance_transfer,
    format_types_sidecar,
    parse_types_sidecar,
    probe_sweep,
)


def nx_copies(g, h):
    """Oracle: monomorphism count over automorphism count, via networkx."""
    G, H = nx.DiGraph(), nx.DiGraph()
    G.add_nodes_from(range(1, g.n + 1))
    G.add_edges_from(g.edges())
    H.add_nodes_from(range(1, h.n + 1))
    H.add_edges_from(h.edges())
    mono = sum(1 for _ in DiGraphMatcher(G, H).subgraph_monomorphisms_iter())
    auto = sum(1 for _ in DiGraphMatcher(H, H).isomorphisms_iter())
    return mono // auto


def exact_k(values, k):
    return sum(1 for c in Counter(values).values() if c == k)


def test_indexing_layout():
    ix = ReducedIndexing(6, 3, 2)
    assert ix.total == 30
    assert list(ix.source_block(2)) == [4, 5, 6]
    assert list(ix.center_block(4)) == [25, 26]
    assert ix.locate(26) == ("center", 4, 2)
    assert ix.locate(18) == ("source", 6, 3)
    with pytest.raises(BadVertexIndex):
        ix.locate(31)


def test_oracle_sizes(tri_dec, star3_dec, sample_seq):
    oracle = ReductionOracle(SequenceAccess(sample_seq), tri_dec, 6, seed=0)
    assert oracle.num_vertices == 30
    assert oracle.s_query_count == 0 and not oracle.T.any() and not oracle.R
    assert ReductionOracle([1], star3_dec, 1).num_vertices == star3_dec.n_comp + star3_dec.n_center
    assert ReductionOracle([], star3_dec, 0).num_vertices == 0


def test_center_lookup_reads_nothing(tri_dec, sample_seq):
    oracle = ReductionOracle(SequenceAccess(sample_seq), tri_dec, 6, seed=0)
    assert oracle.out_neighbor(26, 1) == 25
    assert oracle.out_neighbor(26, 2) is None
    assert oracle.s_query_count == 0


@pytest.mark.parametrize("seed", range(20))
def test_crossing_edge_case(tri_dec, sample_seq, seed):
    oracle = ReductionOracle(SequenceAccess(sample_seq), tri_dec, 6, seed=seed)
    nc = tri_dec.n_comp
    for a in range(1, 7):
        v = (a - 1) * nc + 1
        answer = oracle.out_neighbor(v, 1)
        b, t = int(sample_seq.values[a - 1]), int(oracle.T[a - 1])
        if t == 1:  # block C_1 = {v1}, crossing edge v1 -> v2
            assert answer == 6 * nc + (b - 1) * tri_dec.n_center + 1
            # single-vertex block: locals 2 and 3 are padding
            assert oracle.out_neighbor(v + 1, 1) is None
            assert oracle.out_neighbor(v + 2, 1) is None
    assert oracle.s_query_count == 6


def test_types_drawn_without_replacement(tri_dec, sample_seq):
    for seed in range(30):
        t = assign_types(sample_seq, tri_dec, seed)
        assert sorted(t[[0, 2, 5]].tolist()) == [1, 2, 3]
        assert len(set(t[[1, 4]].tolist())) == 2


def test_type_marginals_uniform(star3_dec):
    firsts = Counter(int(assign_types([1, 1, 1], star3_dec, s)[0]) for s in range(3000))
    assert all(abs(c / 3000 - 1 / 3) < 0.04 for c in firsts.values())


def test_sample_reduction_graph(tri_dec, sample_seq):
    g = build_offline(sample_seq, tri_dec, seed=7)
    assert g.n == 30
    assert count_subgraph_copies(g, tri_dec.pattern) == 1
    assert nx_copies(g, tri_dec.pattern) == 1
    assert disjoint_copy_lower_bound(g, tri_dec.pattern) == 1


def test_all_distinct_gives_no_copy(tri_dec):
    g = build_offline(IntSequence([1, 2, 3, 4], 3), tri_dec, seed=0)
    assert count_subgraph_copies(g, tri_dec.pattern) == 0


@pytest.mark.parametrize("k", [2, 3, 4])
def test_single_value_k_times(k):
    dec = prepare_pattern(k_star(k))
    g = build_offline([1] * k, dec, seed=3)
    assert count_subgraph_copies(g, dec.pattern) == 1 == nx_copies(g, dec.pattern)


def test_offline_errors(star3_dec):
    with pytest.raises(OccurrenceCapExceeded):
        build_offline([1, 1, 1, 1], star3_dec, 0)
    with pytest.raises(ValueOutOfRange):
        build_offline([5, 1], star3_dec, 0)


def test_lazy_errors(star3_dec):
    oracle = ReductionOracle([1, 1, 1, 1], star3_dec, seed=0)
    for a in range(1, 4):
        oracle.out_neighbor(a, 1)
    with pytest.raises(OccurrenceCapExceeded):
        oracle.out_neighbor(4, 1)
    with pytest.raises(ValueOutOfRange):
        ReductionOracle([3, 1], star3_dec).out_neighbor(1, 1)
    with pytest.raises(BadVertexIndex):
        ReductionOracle([1], star3_dec).out_neighbor(0, 1)


def test_rank_hidden_until_queried():
    acc = SequenceAccess([2, 2, 1])
    with pytest.raises(RuntimeError):
        acc.rank(2)
    assert acc.query(2) == 2 and acc.rank(2) == 1
    assert acc.query_count == 1


def test_consistency_examples(tri_dec, sample_seq, star3_dec):
    for seed in range(10):
        assert consistency_check(sample_seq, tri_dec, seed)
        assert consistency_check(sample_seq, tri_dec, seed, order_seed=seed + 100)
    for k in (2, 3, 5):
        assert consistency_check(IntSequence([1], k), prepare_pattern(k_star(k)), 0)


def test_mismatched_seed_is_flagged(tri_dec, sample_seq):
    offline = build_offline(sample_seq, tri_dec, seed=0)
    flagged = 0
    for seed in range(1, 10):
        oracle = ReductionOracle(sample_seq, tri_dec, seed=seed)
        probes = [(v, i) for v in range(1, 31) for i in (1, 2)]
        flagged += not probe_sweep(oracle, offline, probes).consistent
    assert flagged > 0


def random_capped(draw_values, k, n):
    counts = Counter()
    out = []
    for x in draw_values:
        if counts[x] < k:
            counts[x] += 1
            out.append(x)
        if len(out) == n:
            break
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 25), st.sampled_from(["star2", "star3", "tri"]))
def test_thrift_and_order_independence(seed, n, which):
    dec = {"star2": prepare_pattern(k_star(2)), "star3": prepare_pattern(k_star(3))}.get(which)
    if dec is None:
        from digraph_lab.patterns import three_source_pattern
        dec = prepare_pattern(three_source_pattern())
    rng = np.random.default_rng(seed)
    vals = random_capped(rng.integers(1, n + 1, size=4 * n).tolist(), dec.k, n)
    s = IntSequence(vals, dec.k)
    offline = build_offline(s, dec, seed)
    probes = [(v, i) for v in range(1, offline.n + 1) for i in range(1, dec.pattern.d + 2)]
    rng.shuffle(probes)
    rep = probe_sweep(ReductionOracle(s, dec, seed=seed), offline, probes)
    assert rep.consistent
    assert rep.s_queries <= rep.source_positions_probed
    assert rep.center_probe_s_queries == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 3, 4]), st.integers(1, 4))
def test_completeness_and_soundness_on_families(seed, k, mult):
    from digraph_lab.occurrence import make_p, make_q, realizable_step

    dec = prepare_pattern(k_star(k))
    a = build_family("A", k, realizable_step(make_p(k)) * mult, seed)
    b = build_family("B", k, realizable_step(make_q(k)) * mult, seed)
    assert count_subgraph_copies(build_offline(a, dec, seed), dec.pattern) == 0
    gb = build_offline(b, dec, seed)
    assert count_subgraph_copies(gb, dec.pattern) == exact_k(b.tolist(), k)
    assert disjoint_copy_lower_bound(gb, dec.pattern) >= b.n * occurrence_farness(b, k)


def test_degree_preserved(tri_dec):
    b = build_family("B", 3, 12, seed=2)
    g = build_offline(b, tri_dec, seed=2)
    assert g.max_degree() == tri_dec.pattern.max_degree()


def test_determinism(tri_dec):
    b = build_family("B", 3, 24, seed=4)
    assert build_offline(b, tri_dec, 9) == build_offline(b, tri_dec, 9)
    assert (assign_types(b, tri_dec, 9) == assign_types(b, tri_dec, 9)).all()


def test_distance_transfer(tri_dec, star3_dec):
    assert distance_transfer(F(1, 6), 2, tri_dec) == F(1, 60)
    assert distance_transfer(0, 2, tri_dec) == 0
    one = prepare_pattern(k_star(2))
    assert (one.n_comp, one.n_center) == (1, 1)
    assert distance_transfer(F(1, 3), 1, one) == F(1, 6)


def test_sidecar_round_trip(tri_dec, sample_seq):
    t = assign_types(sample_seq, tri_dec, 11)
    seed, back = parse_types_sidecar(format_types_sidecar(11, t))
    assert seed == 11 and (back == t).all()
