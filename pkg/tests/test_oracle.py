import itertools

import numpy as np
import pytest
from conftest import all_pairs, connected_sparse_graph, random_pairs, road_graph

import disland.oracle
from disland.errors import MisuseError, ValidationError
from disland.graph import SearchStats, WeightedGraph, dijkstra
from disland.speedups import ArcFlagIndex
from disland.oracle import (
    DislandConfig,
    ExtraSpaceReport,
    agent_distance,
    extra_space,
    preprocess,
    query,
    region_count,
    source_bytes,
)

FLAGS = list(itertools.product([False, True], repeat=2))

CASES = [(50, 1, 2), (80, 2, 1), (120, 3, 2), (160, 4, 1), (200, 5, 2), (200, 6, 3)]


@pytest.fixture(scope="module", params=CASES, ids=lambda c: f"n{c[0]}-seed{c[1]}-c{c[2]}")
def indexed(request):
    n, seed, c = request.param
    g = road_graph(n, seed)
    return g, preprocess(g, DislandConfig(c=c)), all_pairs(g)


def test_config_validation():
    assert DislandConfig().gamma(100) == 20
    assert DislandConfig(c=3).agent_config.threshold(100) == 30
    bad_configs = [
        dict(c=0),
        dict(epsilon=-0.1),
        dict(k_hint=0),
        dict(rank_filtered_flags=True, use_ch=False),
        dict(rank_filtered_flags=True, use_arcflags=False),
    ]
    for bad in bad_configs:
        with pytest.raises(ValidationError):
            DislandConfig(**bad)


def test_region_count():
    assert region_count(50) == 50
    assert region_count(250) == 20
    assert region_count(1000) == 100
    assert region_count(2500) == 200


def test_path_answers_every_pair(path3):
    idx = preprocess(path3)
    for s, t in itertools.product(range(3), repeat=2):
        for use_ch, use_arcflags in FLAGS:
            d = query(idx, path3, s, t, use_ch=use_ch, use_arcflags=use_arcflags)
            assert d == [[0, 1, 5], [1, 0, 4], [5, 4, 0]][s][t]


def test_branches_of_one_agent_meet_at_the_agent(path3):
    idx = preprocess(path3)
    assert idx.dra.owner[0] == idx.dra.owner[2] == 1
    assert query(idx, path3, 0, 2) == idx.dra.agent_dist[1][0] + idx.dra.agent_dist[1][2]


def test_single_node_graph():
    g = WeightedGraph(1)
    idx = preprocess(g)
    assert idx.dra.agents == []
    assert idx.partition.k == 1
    assert query(idx, g, 0, 0) == 0


def test_empty_graph():
    idx = preprocess(WeightedGraph(0))
    assert idx.partition.k == 0
    assert idx.supergraph.node_count == 0
    report = extra_space(idx)
    assert report.extra_bytes == 0 and report.ratio == 0.0


def test_graph_without_agents_keeps_every_node():
    g = WeightedGraph(6, [(i, (i + 1) % 6, i + 1) for i in range(6)])
    idx = preprocess(g, DislandConfig(c=1))
    assert idx.dra.agents == []
    assert idx.shrink.nodes == list(range(6))
    matrix = all_pairs(g)
    for s, t in itertools.product(range(6), repeat=2):
        assert query(idx, g, s, t) == matrix[s, t]


def test_index_is_exact_under_every_feature_combination(indexed):
    g, idx, matrix = indexed
    for s, t in random_pairs(g.node_count, 300, seed=g.node_count):
        for use_ch, use_arcflags in FLAGS:
            assert query(idx, g, s, t, use_ch=use_ch, use_arcflags=use_arcflags) == matrix[s, t]


def test_index_covers_every_node(indexed):
    g, idx, _ = indexed
    assert len(idx.dra.owner) == g.node_count
    assert idx.partition.node_count == idx.shrink.graph.node_count
    assert set(idx.partition.boundary_nodes) <= set(idx.supergraph.nodes)
    assert len(idx.fragment_region) == idx.partition.k
    assert idx.ch is not None and len(idx.ch) == idx.shrink.graph.node_count


def test_arc_flags_never_settle_more_nodes(indexed):
    g, idx, _ = indexed
    pruned, plain = SearchStats(), SearchStats()
    for s, t in random_pairs(g.node_count, 200, seed=1):
        query(idx, g, s, t, use_ch=False, use_arcflags=True, stats=pruned)
        query(idx, g, s, t, use_ch=False, use_arcflags=False, stats=plain)
    assert pruned.settled <= plain.settled


@pytest.mark.parametrize("seed", range(10))
def test_sparse_graphs_with_many_agents(seed):
    g = connected_sparse_graph(60, seed, p=0.01)
    idx = preprocess(g, DislandConfig(c=1))
    matrix = all_pairs(g)
    for s, t in random_pairs(60, 300, seed):
        for use_ch, use_arcflags in FLAGS:
            assert query(idx, g, s, t, use_ch=use_ch, use_arcflags=use_arcflags) == matrix[s, t]


def test_disabled_features_cannot_be_requested():
    g = road_graph(60, seed=1)
    idx = preprocess(g, DislandConfig(use_ch=False, use_arcflags=False))
    assert idx.ch is None and idx.arcflags is None
    assert query(idx, g, 0, 59) == query(idx, g, 59, 0)
    with pytest.raises(MisuseError):
        query(idx, g, 0, 1, use_ch=True)
    with pytest.raises(MisuseError):
        query(idx, g, 0, 1, use_arcflags=True)


def test_query_validates_input(path3):
    idx = preprocess(path3)
    with pytest.raises(ValidationError):
        query(idx, path3, 0, 3)
    with pytest.raises(MisuseError):
        query(idx, WeightedGraph(4, [(0, 1, 1)]), 0, 1)


def test_agent_distance_composes_any_shrink_router(path3):
    idx = preprocess(path3)
    calls = []

    def shrink_distance(a, b):
        calls.append((a, b))
        return 100

    assert agent_distance(idx.dra, idx.shrink, path3, 0, 2, shrink_distance) == 5
    assert calls == []


def test_extra_space_recounts_the_structures(path3):
    assert extra_space(None) == ExtraSpaceReport()
    report = extra_space(preprocess(path3))
    assert report.dra_edges == 2
    assert report.source_bytes == source_bytes(3, 2) == 4 * 3 + 16 * 2


def test_extra_space_on_a_road_graph(indexed):
    g, idx, _ = indexed
    report = extra_space(idx)
    assert report.dra_edges == idx.dra.member_count
    assert report.ch_shortcuts == idx.ch.shortcut_count
    assert report.supergraph_enforced == idx.supergraph.enforced_count
    assert report.arcflag_bits == idx.arcflags.k * len(idx.arcflags.flags)
    records = report.dra_edges + report.supergraph_enforced + report.ch_shortcuts
    assert report.extra_bytes == 8 * records + -(-report.arcflag_bits // 8)
    assert report.ratio == report.extra_bytes / source_bytes(g.node_count, g.edge_count)


@pytest.fixture
def counters(monkeypatch):
    calls = {"union": 0, "flags": 0}
    union_neighbors, allows = disland.oracle.union_neighbors, ArcFlagIndex.allows

    def counted_union(*args, **kwargs):
        calls["union"] += 1
        return union_neighbors(*args, **kwargs)

    def counted_allows(self, *args):
        calls["flags"] += 1
        return allows(self, *args)

    monkeypatch.setattr(disland.oracle, "union_neighbors", counted_union)
    monkeypatch.setattr(ArcFlagIndex, "allows", counted_allows)
    return calls


@pytest.mark.parametrize("use_ch", [False, True])
def test_queries_search_the_super_graph_with_arc_flags(counters, use_ch):
    g = road_graph(200, seed=3)
    idx = preprocess(g)
    matrix = all_pairs(g)
    for s, t in random_pairs(200, 200, seed=7):
        assert query(idx, g, s, t, use_ch=use_ch) == matrix[s, t]
    assert counters["union"] > 0
    assert counters["flags"] > 0


@pytest.mark.parametrize("seed", range(6))
def test_rank_filtered_flags_keep_ch_queries_exact(seed):
    g = road_graph(150, seed)
    idx = preprocess(g, DislandConfig(rank_filtered_flags=True))
    assert idx.arcflags.rank_filtered
    matrix = all_pairs(g)
    for s, t in random_pairs(150, 300, seed):
        assert query(idx, g, s, t, use_ch=True) == matrix[s, t]
        assert query(idx, g, s, t) == matrix[s, t]
    with pytest.raises(MisuseError):
        query(idx, g, 0, 1, use_arcflags=True)


def exact_distances(g: WeightedGraph, sources):
    return {s: dijkstra(g, s) for s in sources}


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_acceptance_scale_exactness(seed):
    n = (50, 200, 1000)[seed % 3]
    g = road_graph(n, seed)
    idx = preprocess(g)
    rng = np.random.default_rng(seed)
    sources, targets = rng.integers(0, n, size=100).tolist(), rng.integers(0, n, size=100).tolist()
    expected = exact_distances(g, sources)
    for s, t in itertools.product(sources, targets):
        for use_ch, use_arcflags in FLAGS:
            d = query(idx, g, s, t, use_ch=use_ch, use_arcflags=use_arcflags)
            assert d == expected[s][t]
