import itertools

import numpy as np
import pytest
from conftest import (
    all_pairs,
    connected_sparse_graph,
    is_vertex_cover,
    min_vertex_cover_size,
    road_graph,
)

from disland.errors import MisuseError, ValidationError
from disland.graph import UNREACHABLE, WeightedGraph, connected_components
from disland.landmarks import (
    _PairIndex,
    greedy_setcover_landmarks,
    hybrid_cover,
    is_redundant_edge,
    refree_reduce,
    vc_landmark_cover,
)
from disland.speedups import PathShape, classify_path


def shortcut_triangle():
    return WeightedGraph(3, [(0, 1, 2), (0, 2, 1), (2, 1, 1)])


def unit_triangle():
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


def star(leaves: int):
    return WeightedGraph(leaves + 1, [(0, x, x) for x in range(1, leaves + 1)])


def is_landmark_cover(matrix: np.ndarray, nodes) -> bool:
    n = len(matrix)
    for u, v in itertools.combinations(range(n), 2):
        d = matrix[u, v]
        if d >= UNREACHABLE:
            continue
        if not any(matrix[u, x] + matrix[x, v] == d for x in nodes):
            return False
    return True


def test_redundant_edges():
    assert is_redundant_edge(shortcut_triangle(), 0, 1)
    assert not is_redundant_edge(shortcut_triangle(), 0, 2)
    g = unit_triangle()
    assert not any(is_redundant_edge(g, u, v) for u, v, _ in g.edges())


def test_bridges_are_never_redundant(path3):
    assert not is_redundant_edge(path3, 0, 1)
    assert not is_redundant_edge(path3, 2, 1)


def test_non_edge_is_a_misuse(path3):
    with pytest.raises(MisuseError):
        is_redundant_edge(path3, 0, 2)


def test_refree_reduce_drops_the_shortcut():
    assert list(refree_reduce(shortcut_triangle()).edges()) == [(0, 2, 1), (1, 2, 1)]


def test_refree_reduce_keeps_trees():
    g = road_graph(40, seed=1, extra=0)
    assert list(refree_reduce(g).edges()) == list(g.edges())


@pytest.mark.parametrize("seed", range(5))
def test_refree_reduce_preserves_distances(seed):
    g = connected_sparse_graph(30, seed, p=0.15)
    reduced = refree_reduce(g)
    assert np.array_equal(all_pairs(reduced), all_pairs(g))
    assert not any(is_redundant_edge(reduced, u, v) for u, v, _ in reduced.edges())


def small_connected_graphs():
    """Every labelled graph on up to five nodes, plus random ones on six and seven."""
    rng = np.random.default_rng(0)
    for n in range(2, 6):
        slots = list(itertools.combinations(range(n), 2))
        for mask in range(1, 1 << len(slots)):
            edges = [
                (u, v, int(rng.integers(1, 4))) for i, (u, v) in enumerate(slots) if mask >> i & 1
            ]
            g = WeightedGraph(n, edges)
            if len(set(connected_components(g))) == 1:
                yield g
    for seed in range(500):
        yield connected_sparse_graph(6 + seed % 2, seed, p=0.3, max_weight=3)


def test_landmark_covers_of_refree_graphs_are_vertex_covers():
    for g in small_connected_graphs():
        reduced = refree_reduce(g)
        matrix = all_pairs(reduced)
        for size in range(g.node_count + 1):
            for nodes in itertools.combinations(range(g.node_count), size):
                assert is_landmark_cover(matrix, nodes) == is_vertex_cover(reduced, nodes)


def test_vc_cover_of_single_edge():
    cover = vc_landmark_cover(WeightedGraph(2, [(0, 1, 3)]))
    assert cover.landmarks == [0, 1]
    assert cover.distance(0, 1) == 3


def test_vc_cover_of_unit_path():
    g = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    cover = vc_landmark_cover(g)
    assert cover.landmarks == [0, 1, 2, 3]
    assert min_vertex_cover_size(g) == 2


@pytest.mark.parametrize("seed", range(200))
def test_vc_cover_is_a_two_approximation(seed):
    g = connected_sparse_graph(6 + seed % 7, seed, p=0.25)
    cover = vc_landmark_cover(g)
    reduced = refree_reduce(g)
    assert is_vertex_cover(reduced, cover.landmarks)
    assert len(cover) <= 2 * min_vertex_cover_size(reduced)
    matrix = all_pairs(g)
    assert is_landmark_cover(matrix, cover.landmarks)
    for u, v in itertools.combinations(range(g.node_count), 2):
        assert cover.distance(u, v) == matrix[u, v]


def test_greedy_takes_smallest_id_on_ties(path3):
    cover = greedy_setcover_landmarks(path3, [(0, 2)])
    assert cover.landmarks == [0]
    assert cover.distance(0, 2) == 5
    assert cover.enforced_edge_count() == 1


def test_greedy_without_pairs():
    assert greedy_setcover_landmarks(road_graph(10, seed=0), []).landmarks == []


def test_greedy_finds_the_star_center():
    pairs = list(itertools.combinations(range(1, 7), 2))
    cover = greedy_setcover_landmarks(star(6), pairs)
    assert cover.landmarks == [0]
    assert cover.enforced_edge_count() == 6


def test_greedy_rejects_disconnected_pairs():
    with pytest.raises(ValidationError):
        greedy_setcover_landmarks(WeightedGraph(3, [(0, 1, 1)]), [(0, 2)])


def test_hybrid_star_center_is_worth_a_landmark():
    pairs = list(itertools.combinations(range(1, 7), 2))
    cover = hybrid_cover(star(6), pairs)
    assert cover.landmarks == [0]
    assert cover.direct_edges == []
    assert cover.enforced_edges() == [(0, x, x) for x in range(1, 7)]
    assert cover.distance(2, 5) == 7


def test_hybrid_disjoint_pairs_become_direct_edges():
    cover = hybrid_cover(star(6), [(1, 2), (3, 4), (5, 6)])
    assert cover.landmarks == []
    assert cover.direct_edges == [(1, 2, 3), (3, 4, 7), (5, 6, 11)]
    assert len(cover.enforced_edges()) == 3
    assert len(greedy_setcover_landmarks(star(6), [(1, 2), (3, 4), (5, 6)])) == 1


def test_hybrid_unit_triangle_has_no_landmark():
    cover = hybrid_cover(unit_triangle(), [(0, 1), (0, 2), (1, 2)])
    assert cover.landmarks == []
    assert cover.enforced_edges() == [(0, 1, 1), (0, 2, 1), (1, 2, 1)]


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("ranked", [False, True])
def test_hybrid_cover_invariants(seed, ranked):
    g = road_graph(40, seed)
    rng = np.random.default_rng(seed)
    nodes = rng.choice(40, size=12, replace=False).tolist()
    pairs = list(itertools.combinations(nodes, 2))
    order = rng.permutation(40).tolist() if ranked else None
    cover = hybrid_cover(g, pairs, order)
    matrix = all_pairs(g)
    seen = set()
    for x in cover.landmarks:
        claimed = cover.pair_sets[x]
        endpoints = {y for pair in claimed for y in pair} - {x}
        assert set(cover.covered[x]) == endpoints
        assert len(endpoints) <= len(claimed)
        assert not claimed & seen
        seen |= claimed
    assert len(cover.enforced_edges()) <= len(pairs)
    for u, v in pairs:
        assert cover.distance(u, v) == matrix[u, v]


@pytest.mark.parametrize("seed", range(60))
def test_hybrid_never_enforces_more_than_pure_greedy(seed):
    g = road_graph(40, seed)
    rng = np.random.default_rng(seed)
    nodes = rng.choice(40, size=12, replace=False).tolist()
    pairs = list(itertools.combinations(nodes, 2))
    hybrid = hybrid_cover(g, pairs)
    assert len(hybrid.enforced_edges()) <= greedy_setcover_landmarks(g, pairs).enforced_edge_count()


def test_hybrid_may_pick_a_pair_endpoint():
    # Node 0 is an end of three pairs and inside the fourth
    g = WeightedGraph(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    cover = hybrid_cover(g, [(0, 1), (0, 2), (0, 3), (1, 2)])
    assert cover.landmarks == [0]
    assert cover.direct_edges == []
    assert cover.covered[0] == {1: 1, 2: 1, 3: 1}


def unit_path(n: int):
    return WeightedGraph(n, [(x, x + 1, 1) for x in range(n - 1)])


def test_turning_pairs_go_to_their_turning_point():
    g, pairs = unit_path(5), [(0, 4), (1, 3), (0, 3), (1, 4)]
    assert hybrid_cover(g, pairs).landmarks == [1]
    cover = hybrid_cover(g, pairs, order=[0, 1, 4, 3, 2])
    assert cover.landmarks == [2]
    assert cover.pair_sets[2] == frozenset(pairs)
    assert cover.covered[2] == {0: 2, 1: 1, 3: 1, 4: 2}


def test_rising_pairs_go_to_the_greedy_phase():
    cover = hybrid_cover(unit_path(5), [(0, 4)], order=[0, 1, 2, 3, 4])
    assert cover.landmarks == []
    assert cover.direct_edges == [(0, 4, 4)]


def test_shortest_path_prefers_an_order_turning_one():
    # Two shortest 0-3 paths: through 1 (rank 1) and through 2 (rank 3)
    g = WeightedGraph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])
    order = [0, 1, 3, 2]
    index = _PairIndex(g, [(0, 3)])
    path = index.shortest_path(0, order)
    assert path == [0, 2, 3]
    assert classify_path(order, path) is PathShape.TURNING
    assert hybrid_cover(g, [(0, 3)], order).direct_edges == [(0, 3, 2)]
