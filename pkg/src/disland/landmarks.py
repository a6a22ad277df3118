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
"""Landmark covers: redundant edges, RE-free reduction, vertex-cover and set-cover landmark
selection, and hybrid covers that fall back to direct distance edges where a landmark would
cost more space than it saves.
"""
import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from disland.errors import MisuseError, ValidationError
from disland.graph import UNREACHABLE, DistanceMap, WeightedGraph, dijkstra, search
from disland.speedups import PathShape, classify_path

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


def _without_edge(adjacency, u: int, v: int):
    def neighbors(x):
        for y, w in adjacency(x):
            if (x == u and y == v) or (x == v and y == u):
                continue
            yield y, w

    return neighbors


def _has_alternative(adjacency, u: int, v: int, w: int) -> bool:
    # Once the frontier passes w no alternative of length <= w can appear
    settled = search(_without_edge(adjacency, u, v), u, targets=(v,), bound=w)
    return settled[v] <= w


def is_redundant_edge(g: WeightedGraph, u: int, v: int) -> bool:
    w = g.weight(u, v)
    if w is None:
        raise MisuseError(f"({u}, {v}) is not an edge")
    return _has_alternative(g.neighbors, u, v, w)


def refree_reduce(g: WeightedGraph) -> WeightedGraph:
    """Drop redundant edges in ascending (u, v) order, testing each against the reduced graph."""
    adjacency = [dict(g.neighbors(u)) for u in range(g.node_count)]
    removed = 0
    for u, v, w in g.edges():
        if _has_alternative(lambda x: adjacency[x].items(), u, v, w):
            del adjacency[u][v]
            del adjacency[v][u]
            removed += 1
    logger.debug(f"RE-free reduction removed {removed} of {g.edge_count} edges")
    kept = ((u, v, w) for u in range(g.node_count) for v, w in adjacency[u].items() if u < v)
    return WeightedGraph(g.node_count, kept, g.coordinates)


@dataclass
class LandmarkCover:
    landmarks: List[int]
    # dist_vectors[x][y] = dist(x, y) over the nodes x covers, x itself included
    dist_vectors: Dict[int, Dict[int, int]]

    def __len__(self):
        return len(self.landmarks)

    def distance(self, u: int, v: int) -> int:
        best = UNREACHABLE
        for x in self.landmarks:
            vector = self.dist_vectors[x]
            if u in vector and v in vector:
                best = min(best, vector[u] + vector[v])
        return best

    def enforced_edge_count(self) -> int:
        return sum(len(vector) - (x in vector) for x, vector in self.dist_vectors.items())


@dataclass
class HybridLandmarkCover:
    landmarks: List[int]
    # covered[x] maps every node of N_x to dist(x, node)
    covered: Dict[int, Dict[int, int]]
    direct_edges: List[Tuple[int, int, int]]
    pair_sets: Dict[int, FrozenSet[Pair]] = field(default_factory=dict)

    def enforced_edges(self) -> List[Tuple[int, int, int]]:
        """E_D~ as sorted (u, v, d) with u < v; coinciding pairs keep the smaller distance."""
        edges: Dict[Pair, int] = {}
        links = [(x, y, d) for x, nodes in self.covered.items() for y, d in nodes.items()]
        for u, v, d in links + self.direct_edges:
            key = (u, v) if u < v else (v, u)
            if d < edges.get(key, UNREACHABLE):
                edges[key] = d
        return [(u, v, d) for (u, v), d in sorted(edges.items())]

    def distance(self, u: int, v: int) -> int:
        best = UNREACHABLE
        for x in self.landmarks:
            vector = self.covered[x]
            du = 0 if u == x else vector.get(u)
            dv = 0 if v == x else vector.get(v)
            if du is not None and dv is not None:
                best = min(best, du + dv)
        for a, b, d in self.direct_edges:
            if {a, b} == {u, v}:
                best = min(best, d)
        return best


class _PairIndex:
    """Target pairs, their distances and the nodes lying on some shortest path of each."""

    def __init__(self, g: WeightedGraph, pairs: Iterable[Pair]):
        self.g = g
        self.pairs: List[Pair] = sorted({(u, v) if u < v else (v, u) for u, v in pairs if u != v})
        self.cache: Dict[int, DistanceMap] = {}
        self.lengths: List[int] = []
        self.candidates: Dict[int, Set[int]] = {}
        for i, (u, v) in enumerate(self.pairs):
            du, dv = self.dist(u), self.dist(v)
            d = du[v]
            if d >= UNREACHABLE:
                raise ValidationError(f"pair ({u}, {v}) is not connected")
            self.lengths.append(d)
            for x in self.on_paths(i):
                self.candidates.setdefault(x, set()).add(i)

    def dist(self, x: int) -> DistanceMap:
        if x not in self.cache:
            self.cache[x] = dijkstra(self.g, x)
        return self.cache[x]

    def on_paths(self, i: int) -> List[int]:
        u, v = self.pairs[i]
        d, du, dv = self.lengths[i], self.dist(u), self.dist(v)
        return [x for x, dx in du.items() if dx <= d and dx + dv[x] == d]

    def endpoints(self, x: int, claimed: Iterable[int]) -> Set[int]:
        return {y for i in claimed for y in self.pairs[i]} - {x}

    def shortest_path(self, i: int, rank: Sequence[int]) -> List[int]:
        """A shortest u-v path, order turning when one exists, else order rising, else the
        one through the smallest predecessors."""
        u, v = self.pairs[i]
        du = self.dist(u)
        on = set(self.on_paths(i))
        # 0: nothing walked yet, 1: only climbed, 2: descending after a climb
        parent: Dict[Tuple[int, int], Tuple[int, int]] = {(u, 0): (u, 0)}
        for y in sorted(on, key=lambda x: (du[x], x)):
            for state in (0, 1, 2):
                if (y, state) not in parent:
                    continue
                for z, w in sorted(self.g.neighbors(y)):
                    if z not in on or du[y] + w != du[z]:
                        continue
                    if rank[z] > rank[y]:
                        if state == 2:
                            continue
                        step = 1
                    elif state == 0:
                        continue
                    else:
                        step = 2
                    parent.setdefault((z, step), (y, state))
        for state in (2, 1):
            if (v, state) in parent:
                path, key = [v], (v, state)
                while key != (u, 0):
                    key = parent[key]
                    path.append(key[0])
                return path[::-1]
        path = [v]
        while path[-1] != u:
            z = path[-1]
            path.append(min(y for y, w in self.g.neighbors(z) if y in on and du[y] + w == du[z]))
        return path[::-1]


def _greedy(
    index: _PairIndex, remaining: Set[int], accept: Optional[Callable[[int, Set[int]], bool]] = None
) -> List[Tuple[int, Set[int]]]:
    """Lazy max-coverage picks in order, ties to the smallest node id. Pairs of a pick that
    `accept` turns down stay open for the other candidates."""
    picks = []
    heap = [(-len(claims), x) for x, claims in index.candidates.items()]
    heapq.heapify(heap)
    while heap and remaining:
        key, x = heapq.heappop(heap)
        claims = index.candidates[x] & remaining
        if not claims:
            continue
        if len(claims) < -key:
            heapq.heappush(heap, (-len(claims), x))
            continue
        if accept is None or accept(x, claims):
            picks.append((x, claims))
            remaining -= claims
    return picks


def vc_landmark_cover(g: WeightedGraph) -> LandmarkCover:
    """2-approximate landmark cover from a maximal matching of the RE-free graph."""
    reduced = refree_reduce(g)
    matched: Set[int] = set()
    for u, v, _ in reduced.edges():
        if u not in matched and v not in matched:
            matched.update((u, v))
    landmarks = sorted(matched)
    return LandmarkCover(landmarks, {x: dict(dijkstra(g, x)) for x in landmarks})


def greedy_setcover_landmarks(g: WeightedGraph, pairs: Iterable[Pair]) -> LandmarkCover:
    index = _PairIndex(g, pairs)
    picks = _greedy(index, set(range(len(index.pairs))))
    vectors = {}
    for x, claims in picks:
        nodes = index.endpoints(x, claims) | {x}
        vectors[x] = {y: index.dist(x)[y] for y in sorted(nodes)}
    return LandmarkCover([x for x, _ in picks], vectors)


def hybrid_cover(
    g: WeightedGraph, pairs: Iterable[Pair], order: Optional[Sequence[int]] = None
) -> HybridLandmarkCover:
    """Landmarks only where |N_x| <= |P_x|; everything else becomes a direct distance edge.

    `order` is a contraction rank per node. Pairs with an order-turning shortest path go to
    its turning point first. The rest replay the pure greedy cover, each pick kept as a
    landmark or stored as direct edges, whichever is smaller, so the enforced edges never
    outnumber those of `greedy_setcover_landmarks`. Direct pairs are finally offered to
    any candidate that passes the cost test.
    """
    index = _PairIndex(g, pairs)
    remaining = set(range(len(index.pairs)))
    chosen: Dict[int, Set[int]] = {}

    def worth_a_landmark(x, claims):
        # A landmark at an end of every pair it takes stores exactly those pairs' edges
        interior = any(x not in index.pairs[i] for i in claims)
        return interior and len(index.endpoints(x, claims)) <= len(claims)

    if order is not None:
        groups: Dict[int, Set[int]] = {}
        for i in sorted(remaining):
            path = index.shortest_path(i, order)
            if classify_path(order, path) is PathShape.TURNING:
                groups.setdefault(max(path, key=order.__getitem__), set()).add(i)
        for x in sorted(groups, key=lambda x: (-order[x], x)):
            if worth_a_landmark(x, groups[x]):
                chosen[x] = groups[x]
                remaining -= groups[x]

    direct: Set[int] = set()
    for x, claims in _greedy(index, set(remaining)):
        if worth_a_landmark(x, claims):
            chosen.setdefault(x, set()).update(claims)
        else:
            direct |= claims
    while True:
        picks = _greedy(index, direct, worth_a_landmark)
        if not picks:
            break
        for x, claims in picks:
            chosen.setdefault(x, set()).update(claims)

    landmarks = sorted(chosen)
    covered = {
        x: {y: index.dist(x)[y] for y in sorted(index.endpoints(x, chosen[x]))} for x in landmarks
    }
    direct_edges = [(*index.pairs[i], index.lengths[i]) for i in sorted(direct)]
    pair_sets = {x: frozenset(index.pairs[i] for i in chosen[x]) for x in landmarks}
    logger.debug(
        f"Hybrid cover of {len(index.pairs)} pairs: {len(landmarks)} landmarks, "
        f"{len(direct_edges)} direct edges"
    )
    return HybridLandmarkCover(landmarks, covered, direct_edges, pair_sets)
