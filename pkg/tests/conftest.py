import itertools
from typing import List, Set

import numpy as np
import pytest

from disland.graph import UNREACHABLE, WeightedGraph, connected_components


def road_graph(n: int, seed: int, extra: float = 0.25, max_weight: int = 20) -> WeightedGraph:
    """Connected graph with a random recursive tree as backbone plus short-range chords.

    The tree leaves plenty of pendant subtrees and cut nodes; the chords add cycles between
    nodes that are close in id, the way road junctions close loops locally.
    """
    rng = np.random.default_rng(seed)
    edges = []
    for v in range(1, n):
        u = int(rng.integers(max(0, v - 8), v))
        edges.append((u, v, int(rng.integers(1, max_weight + 1))))
    for _ in range(int(extra * n)):
        u = int(rng.integers(0, n))
        v = int(rng.integers(max(0, u - 6), min(n, u + 7)))
        edges.append((u, v, int(rng.integers(1, max_weight + 1))))
    coordinates = rng.integers(0, 10_000, size=(n, 2))
    return WeightedGraph(n, edges, coordinates)


def sparse_graph(n: int, seed: int, p: float = 0.3, max_weight: int = 5) -> WeightedGraph:
    """Erdos-Renyi style graph, possibly disconnected; used by the small exhaustive checks."""
    rng = np.random.default_rng(seed)
    edges = [
        (u, v, int(rng.integers(1, max_weight + 1)))
        for u, v in itertools.combinations(range(n), 2)
        if rng.random() < p
    ]
    return WeightedGraph(n, edges)


def connected_sparse_graph(n: int, seed: int, p: float = 0.3, max_weight: int = 5):
    rng = np.random.default_rng(seed)
    edges = [
        (int(rng.integers(0, v)), v, int(rng.integers(1, max_weight + 1))) for v in range(1, n)
    ]
    edges += [
        (u, v, int(rng.integers(1, max_weight + 1)))
        for u, v in itertools.combinations(range(n), 2)
        if rng.random() < p
    ]
    return WeightedGraph(n, edges)


def all_pairs(g: WeightedGraph) -> np.ndarray:
    """Floyd-Warshall distance matrix, UNREACHABLE where no path exists."""
    n = g.node_count
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0)
    for u, v, w in g.edges():
        dist[u, v] = dist[v, u] = w
    for k in range(n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    out = np.full((n, n), UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int64)
    return out


def component_count(g: WeightedGraph) -> int:
    return len(set(connected_components(g)))


def brute_cut_nodes(g: WeightedGraph) -> Set[int]:
    base = component_count(g)
    cuts = set()
    for x in range(g.node_count):
        rest, _ = g.subgraph([y for y in range(g.node_count) if y != x])
        if component_count(rest) > base:
            cuts.add(x)
    return cuts


def is_vertex_cover(g: WeightedGraph, nodes) -> bool:
    nodes = set(nodes)
    return all(u in nodes or v in nodes for u, v, _ in g.edges())


def min_vertex_cover_size(g: WeightedGraph) -> int:
    for size in range(g.node_count + 1):
        for nodes in itertools.combinations(range(g.node_count), size):
            if is_vertex_cover(g, nodes):
                return size
    return g.node_count


def random_pairs(n: int, count: int, seed: int) -> List:
    rng = np.random.default_rng(seed)
    return [(int(s), int(t)) for s, t in rng.integers(0, n, size=(count, 2))]


@pytest.fixture
def path3():
    """Path 0-1-2 with weights 1 and 4."""
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 4)])


@pytest.fixture
def triangle_pendant():
    """Unit triangle {0, 1, 2} with the pendant edge (0, 3)."""
    return WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 3, 1)])


@pytest.fixture(params=[(50, 1), (120, 2), (200, 3)], ids=lambda p: f"n{p[0]}")
def road(request):
    n, seed = request.param
    return road_graph(n, seed)
