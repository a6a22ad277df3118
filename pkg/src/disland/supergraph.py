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
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from tqdm import tqdm

from disland.graph import UNREACHABLE, WeightedGraph, dijkstra
from disland.landmarks import hybrid_cover
from disland.partition import Partition

logger = logging.getLogger(__name__)


class EdgeKind(IntEnum):
    CROSS = 0
    ENFORCED = 1


@dataclass(frozen=True)
class SuperEdge:
    weight: int
    kind: EdgeKind
    # Fragment whose local distance the edge carries, -1 for cross edges
    fragment: int = -1


@dataclass
class SuperGraph:
    """Boundary nodes and fragment landmarks, joined by cross edges and enforced edges.

    Node ids are those of the partitioned graph. Edge keys are (u, v) with u < v.
    """

    nodes: List[int]
    edges: Dict[Tuple[int, int], SuperEdge]
    fragment_landmarks: List[List[int]]
    fragment_enforced: List[int]
    _adj: Dict[int, List[Tuple[int, int]]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._adj = {x: [] for x in self.nodes}
        for (u, v), edge in sorted(self.edges.items()):
            self._adj[u].append((v, edge.weight))
            self._adj[v].append((u, edge.weight))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def enforced_count(self) -> int:
        return sum(self.fragment_enforced)

    def __contains__(self, x: int) -> bool:
        return x in self._adj

    def neighbors(self, u: int) -> List[Tuple[int, int]]:
        return self._adj.get(u, [])

    @cached_property
    def local_of(self) -> Dict[int, int]:
        return {x: i for i, x in enumerate(self.nodes)}

    def as_graph(self) -> WeightedGraph:
        """The super graph relabelled to 0..node_count-1 in `nodes` order."""
        local = self.local_of
        edges = ((local[u], local[v], e.weight) for (u, v), e in self.edges.items())
        return WeightedGraph(self.node_count, edges)


def local_global_filter(g: WeightedGraph, p: Partition, i: int) -> Set[Tuple[int, int]]:
    """Boundary pairs of fragment `i` whose fragment-local distance is globally shortest."""
    boundary = p.boundary[i]
    fragment = set(p.members[i])
    pairs = set()
    for u in boundary:
        local = dijkstra(g, u, targets=boundary, node_filter=fragment.__contains__)
        global_ = dijkstra(g, u, targets=boundary)
        for v in boundary:
            if v > u and local[v] < UNREACHABLE and local[v] == global_[v]:
                pairs.add((u, v))
    return pairs


def _add_edge(edges, u: int, v: int, edge: SuperEdge):
    key = (u, v) if u < v else (v, u)
    if key not in edges or edge.weight < edges[key].weight:
        edges[key] = edge


def build_supergraph(
    g: WeightedGraph,
    p: Partition,
    order: Optional[Sequence[int]] = None,
    progress: bool = False,
) -> SuperGraph:
    """Assemble the super graph of partition `p` over `g`.

    Args:
        order: contraction rank of every node of `g`; steers each fragment's hybrid cover
            towards the highest-ranked node of order-turning paths.
    """
    edges: Dict[Tuple[int, int], SuperEdge] = {}
    for u, v, w in p.cross_edges:
        _add_edge(edges, u, v, SuperEdge(w, EdgeKind.CROSS))

    nodes = set(p.boundary_nodes)
    fragment_landmarks: List[List[int]] = []
    fragment_enforced: List[int] = []
    for i in tqdm(range(p.k), desc="fragment covers", disable=not progress):
        pairs = local_global_filter(g, p, i)
        if not pairs:
            fragment_landmarks.append([])
            fragment_enforced.append(0)
            continue
        sub, members = g.subgraph(p.members[i])
        local = {x: j for j, x in enumerate(members)}
        cover = hybrid_cover(
            sub,
            ((local[u], local[v]) for u, v in sorted(pairs)),
            None if order is None else [order[x] for x in members],
        )
        enforced = cover.enforced_edges()
        for a, b, d in enforced:
            _add_edge(edges, members[a], members[b], SuperEdge(d, EdgeKind.ENFORCED, i))
        landmarks = [members[x] for x in cover.landmarks]
        nodes.update(landmarks)
        fragment_landmarks.append(landmarks)
        fragment_enforced.append(len(enforced))
        logger.debug(
            f"Fragment {i}: {len(pairs)} pairs, {len(landmarks)} landmarks, "
            f"{len(enforced)} enforced edges"
        )

    sg = SuperGraph(sorted(nodes), edges, fragment_landmarks, fragment_enforced)
    logger.info(
        f"Super graph has {sg.node_count} nodes and {sg.edge_count} edges "
        f"({sg.enforced_count} enforced)"
    )
    return sg


def union_neighbors(
    g: WeightedGraph,
    p: Partition,
    sg: SuperGraph,
    fragments: Iterable[int],
    allow: Optional[Callable[[int, int], bool]] = None,
):
    """Neighbour function of G[V_s] + G[V_t] + super graph, resolved lazily per node.

    `allow(u, v)` filters super-graph edges only; fragment edges are always kept.
    """
    inside = set(fragments)
    fragment_of = p.fragment_of

    def neighbors(u):
        best: Dict[int, int] = {}
        if fragment_of[u] in inside:
            for v, w in g.neighbors(u):
                if fragment_of[v] == fragment_of[u]:
                    best[v] = w
        for v, w in sg.neighbors(u):
            if allow is not None and not allow(u, v):
                continue
            if w < best.get(v, UNREACHABLE):
                best[v] = w
        return best.items()

    return neighbors
