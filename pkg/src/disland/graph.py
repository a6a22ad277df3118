# MIT License
#
# Copyright (c) 2024 The disland authors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
import hashlib
import heapq
from dataclasses import dataclass
from typing import (
    Callable,
    Collection,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from disland.errors import ValidationError

# Distances are plain ints; the sentinel is the largest signed 64-bit value
UNREACHABLE = int(np.iinfo(np.int64).max)

Edge = Tuple[int, int, int]
Neighbors = Callable[[int], Iterable[Tuple[int, int]]]


def add_distances(*distances: int) -> int:
    if any(d >= UNREACHABLE for d in distances):
        return UNREACHABLE
    return sum(distances)


@dataclass
class SearchStats:
    settled: int = 0


class DistanceMap(dict):
    """Settled distances of one search. Missing nodes read as UNREACHABLE."""

    def __missing__(self, key):
        return UNREACHABLE


class WeightedGraph:
    """Undirected graph with strictly positive integer edge weights.

    Parallel edges collapse to their minimum weight and self-loops are dropped, so the
    adjacency is always that of a simple graph. The graph is never mutated after
    construction.
    """

    def __init__(
        self,
        node_count: int,
        edges: Iterable[Edge] = (),
        coordinates: Optional[np.ndarray] = None,
    ):
        if node_count < 0:
            raise ValidationError(f"node count must be non-negative, got {node_count}")
        self._adj: List[Dict[int, int]] = [{} for _ in range(node_count)]
        for u, v, w in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValidationError(
                    f"edge ({u}, {v}) references a node outside [0, {node_count})"
                )
            if int(w) != w or w <= 0:
                raise ValidationError(f"edge ({u}, {v}) has non-positive or non-integer weight {w}")
            if u == v:
                continue
            w = int(w)
            if w < self._adj[u].get(v, UNREACHABLE):
                self._adj[u][v] = w
                self._adj[v][u] = w
        for u in range(node_count):
            self._adj[u] = dict(sorted(self._adj[u].items()))
        self._edge_count = sum(len(a) for a in self._adj) // 2

        if coordinates is not None:
            coordinates = np.asarray(coordinates, dtype=np.int64)
            if coordinates.shape != (node_count, 2):
                raise ValidationError(
                    f"coordinates must have shape ({node_count}, 2), got {coordinates.shape}"
                )
        self.coordinates = coordinates

    def __repr__(self):
        return f"WeightedGraph(node_count={self.node_count}, edge_count={self.edge_count})"

    @property
    def node_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def __len__(self):
        return self.node_count

    def neighbors(self, u: int) -> Iterable[Tuple[int, int]]:
        return self._adj[u].items()

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def weight(self, u: int, v: int) -> Optional[int]:
        return self._adj[u].get(v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edges(self) -> Iterator[Edge]:
        """Every undirected edge once as (u, v, w) with u < v, in ascending (u, v) order."""
        for u, adjacency in enumerate(self._adj):
            for v, w in adjacency.items():
                if u < v:
                    yield u, v, w

    def subgraph(self, nodes: Sequence[int]) -> Tuple["WeightedGraph", List[int]]:
        """Induced subgraph relabelled to 0..len(nodes)-1 in the given order.

        Returns the subgraph and the list mapping local ids back to ids of this graph.
        """
        nodes = list(nodes)
        local = {node: i for i, node in enumerate(nodes)}
        edges = [
            (local[u], local[v], w)
            for u in nodes
            for v, w in self._adj[u].items()
            if v in local and u < v
        ]
        coordinates = None if self.coordinates is None else self.coordinates[nodes]
        return WeightedGraph(len(nodes), edges, coordinates), nodes


def search(
    neighbors: Neighbors,
    source: int,
    targets: Optional[Collection[int]] = None,
    bound: Optional[int] = None,
    stats: Optional[SearchStats] = None,
) -> DistanceMap:
    """Binary-heap Dijkstra over an arbitrary neighbour function.

    Only settled nodes are reported. The search stops once every target is settled or
    the next tentative distance exceeds `bound`. Ties are settled in ascending node id.
    """
    settled = DistanceMap()
    tentative = {source: 0}
    heap = [(0, source)]
    remaining = set(targets) if targets is not None else None
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled:
            continue
        if bound is not None and d > bound:
            break
        settled[u] = d
        if remaining is not None:
            remaining.discard(u)
            if not remaining:
                break
        for v, w in neighbors(u):
            if v in settled:
                continue
            nd = d + w
            if nd < tentative.get(v, UNREACHABLE):
                tentative[v] = nd
                heapq.heappush(heap, (nd, v))
    if stats is not None:
        stats.settled += len(settled)
    return settled


def dijkstra(
    g: WeightedGraph,
    source: int,
    targets: Optional[Collection[int]] = None,
    node_filter: Optional[Callable[[int], bool]] = None,
    stats: Optional[SearchStats] = None,
) -> DistanceMap:
    if node_filter is None:
        return search(g.neighbors, source, targets, stats=stats)

    def admitted(u):
        return ((v, w) for v, w in g.neighbors(u) if node_filter(v))

    return search(admitted, source, targets, stats=stats)


def connected_components(g: WeightedGraph) -> List[int]:
    """Label every node with its component; labels follow the smallest node of each."""
    labels = [-1] * g.node_count
    label = 0
    for root in range(g.node_count):
        if labels[root] != -1:
            continue
        labels[root] = label
        stack = [root]
        while stack:
            u = stack.pop()
            for v, _ in g.neighbors(u):
                if labels[v] == -1:
                    labels[v] = label
                    stack.append(v)
        label += 1
    return labels


def graph_checksum(g: WeightedGraph) -> str:
    edges = np.array(list(g.edges()), dtype="<i8").reshape(-1, 3)
    digest = hashlib.sha256()
    digest.update(np.array([g.node_count, g.edge_count], dtype="<i8").tobytes())
    digest.update(edges.tobytes())
    return digest.hexdigest()
