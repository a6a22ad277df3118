import numpy as np
import pytest
from conftest import all_pairs, road_graph, sparse_graph

from disland.errors import ValidationError
from disland.graph import (
    UNREACHABLE,
    SearchStats,
    WeightedGraph,
    add_distances,
    connected_components,
    dijkstra,
    graph_checksum,
)


def test_edges_are_symmetric_and_deduplicated():
    g = WeightedGraph(3, [(0, 1, 5), (1, 0, 3), (1, 2, 2), (2, 2, 7)])
    assert g.edge_count == 2
    assert g.weight(0, 1) == g.weight(1, 0) == 3
    assert not g.has_edge(2, 2)
    assert list(g.edges()) == [(0, 1, 3), (1, 2, 2)]


@pytest.mark.parametrize("edge", [(0, 3, 1), (-1, 0, 1), (0, 1, 0), (0, 1, -2), (0, 1, 1.5)])
def test_invalid_edges_are_rejected(edge):
    with pytest.raises(ValidationError):
        WeightedGraph(3, [edge])


def test_coordinates_shape_is_checked():
    with pytest.raises(ValidationError):
        WeightedGraph(2, [], np.zeros((3, 2)))


def test_dijkstra_on_path(path3):
    assert dict(dijkstra(path3, 0)) == {0: 0, 1: 1, 2: 5}


def test_dijkstra_matches_floyd_warshall():
    g = road_graph(50, seed=7)
    matrix = all_pairs(g)
    for s in range(0, 50, 7):
        dist = dijkstra(g, s)
        assert [dist[t] for t in range(50)] == matrix[s].tolist()


def test_early_exit_agrees_with_full_run():
    g = road_graph(80, seed=11)
    full = dijkstra(g, 3)
    targets = [10, 40, 79]
    early = dijkstra(g, 3, targets=targets)
    assert all(early[t] == full[t] for t in targets)
    assert len(early) <= len(full)


def test_node_filter_and_unreachable(path3):
    dist = dijkstra(path3, 0, node_filter=lambda x: x != 1)
    assert dist[0] == 0
    assert dist[2] == UNREACHABLE


def test_search_stats_count_settled_nodes(path3):
    stats = SearchStats()
    dijkstra(path3, 0, stats=stats)
    dijkstra(path3, 2, targets=(1,), stats=stats)
    assert stats.settled == 3 + 2


def test_add_distances_propagates_unreachable():
    assert add_distances(1, 2, 3) == 6
    assert add_distances(1, UNREACHABLE) == UNREACHABLE


def test_connected_components():
    assert connected_components(WeightedGraph(3, [(0, 1, 1), (1, 2, 1)])) == [0, 0, 0]
    assert connected_components(WeightedGraph(4, [(0, 1, 1), (2, 3, 1)])) == [0, 0, 1, 1]


@pytest.mark.parametrize("seed", range(5))
def test_components_agree_with_reachability(seed):
    g = sparse_graph(15, seed, p=0.12)
    labels = connected_components(g)
    matrix = all_pairs(g)
    for s in range(15):
        for t in range(15):
            assert (labels[s] == labels[t]) == (matrix[s, t] < UNREACHABLE)


def test_subgraph_relabels_in_given_order():
    g = road_graph(30, seed=2)
    nodes = [20, 3, 7, 8]
    sub, back = g.subgraph(nodes)
    assert back == nodes
    for a, b, w in sub.edges():
        assert g.weight(back[a], back[b]) == w
    assert np.array_equal(sub.coordinates, g.coordinates[nodes])


def test_checksum_depends_on_edges_only():
    a = WeightedGraph(3, [(0, 1, 1), (1, 2, 4)])
    b = WeightedGraph(3, [(2, 1, 4), (1, 0, 1)], np.ones((3, 2)))
    c = WeightedGraph(3, [(0, 1, 1), (1, 2, 5)])
    assert graph_checksum(a) == graph_checksum(b)
    assert graph_checksum(a) != graph_checksum(c)
