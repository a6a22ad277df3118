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
"""Agents and their deterministic routing areas (DRAs).

An agent `u` represents a set of nodes that reach the rest of the graph only through `u`.
Every such area is split into branches, each hanging off `u` on its own and each holding
at most `c * isqrt(n)` nodes (agent included).
"""
import heapq
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from tqdm import tqdm

from disland.connectivity import build_sketch, find_bccs
from disland.errors import MisuseError, ValidationError
from disland.graph import SearchStats, WeightedGraph, connected_components, dijkstra

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentConfig:
    c: int = 2

    def __post_init__(self):
        if self.c < 1:
            raise ValidationError(f"agent constant c must be >= 1, got {self.c}")

    def threshold(self, node_count: int) -> int:
        return self.c * math.isqrt(node_count)


@dataclass(frozen=True)
class DraAssignment:
    # owner[x] is the agent representing x; agents and unrepresented nodes own themselves
    owner: List[int]
    # Index into branches[owner[x]] for every non-agent member, -1 elsewhere
    branch_of: List[int]
    # Non-agent members of each branch, sorted; branches ordered by smallest member
    branches: Dict[int, List[Tuple[int, ...]]]
    agent_dist: Dict[int, Dict[int, int]]
    threshold: int

    @property
    def agents(self) -> List[int]:
        """Maximal agents with a non-trivial DRA, ascending."""
        return sorted(self.branches)

    @property
    def dra_members(self) -> Dict[int, FrozenSet[int]]:
        return {
            u: frozenset((u,) + tuple(x for branch in branches for x in branch))
            for u, branches in self.branches.items()
        }

    @property
    def member_count(self) -> int:
        """Nodes strictly inside some DRA; equals the sum of |A+| minus the agent count."""
        return sum(len(branch) for branches in self.branches.values() for branch in branches)

    def is_member(self, x: int) -> bool:
        return self.owner[x] != x


@dataclass(frozen=True)
class ShrinkGraph:
    graph: WeightedGraph
    # Original id of every shrink-graph node, ascending
    nodes: List[int]

    @cached_property
    def local_of(self) -> Dict[int, int]:
        return {x: i for i, x in enumerate(self.nodes)}


class _SketchReducer:
    """Merges leaf BCC groups of the BC-sketch into their single non-leaf neighbour."""

    def __init__(self, g: WeightedGraph, large_component: List[bool], threshold: int):
        decomposition = find_bccs(g)
        sketch = build_sketch(g, decomposition)
        self.threshold = threshold
        self.base = sketch.members
        self.omega = list(sketch.weights)
        self.cuts: List[Set[int]] = [set(c) for c in sketch.bcc_cuts]
        self.merges: List[List[Tuple[int, List[int]]]] = [[] for _ in self.omega]
        self.absorbed = [False] * len(self.omega)
        self.cut_blobs: Dict[int, Set[int]] = {
            v: set(bccs) for v, bccs in sketch.cut_bccs.items() if large_component[v]
        }
        self.merged_cuts: Set[int] = set()
        self.large = [large_component[next(iter(m))] for m in sketch.members]

    def is_leaf(self, b: int) -> bool:
        return len(self.cuts[b]) == 1

    def reduce(self):
        frontier = [v for v, blobs in self.cut_blobs.items() if any(map(self.is_leaf, blobs))]
        heapq.heapify(frontier)
        while frontier:
            v = heapq.heappop(frontier)
            if v in self.merged_cuts:
                continue
            blobs = self.cut_blobs[v]
            inner = [b for b in blobs if not self.is_leaf(b)]
            if len(inner) != 1:
                continue
            alpha = sum(self.omega[b] for b in blobs) - len(blobs) + 1
            if alpha > self.threshold:
                continue
            y = inner[0]
            leaves = sorted(b for b in blobs if b != y)
            for b in leaves:
                self.absorbed[b] = True
            self.omega[y] = alpha
            self.cuts[y].discard(v)
            self.merges[y].append((v, leaves))
            self.merged_cuts.add(v)
            if self.is_leaf(y):
                heapq.heappush(frontier, next(iter(self.cuts[y])))

    def nodes(self, b: int) -> Set[int]:
        out: Set[int] = set()
        stack = [b]
        while stack:
            x = stack.pop()
            out.update(self.base[x])
            for _, leaves in self.merges[x]:
                stack.extend(leaves)
        return out

    def branches(self) -> Dict[int, List[Set[int]]]:
        self.reduce()
        out: Dict[int, List[Set[int]]] = {}
        taken = set()
        for v in sorted(self.cut_blobs):
            if v in self.merged_cuts:
                continue
            for b in sorted(self.cut_blobs[v]):
                if self.is_leaf(b) and self.omega[b] <= self.threshold:
                    out.setdefault(v, []).append(self.nodes(b) - {v})
                    taken.add(b)
        # Groups merged inside a blob that never became a branch still hang off their cut node
        for b in range(len(self.omega)):
            if b in taken or self.absorbed[b] or not self.large[b]:
                continue
            for v, leaves in self.merges[b]:
                for leaf in leaves:
                    out.setdefault(v, []).append(self.nodes(leaf) - {v})
        return out


def compute_dras(
    g: WeightedGraph, cfg: AgentConfig = AgentConfig(), progress: bool = False
) -> DraAssignment:
    n = g.node_count
    threshold = cfg.threshold(n)
    labels = connected_components(g)
    sizes: Dict[int, int] = {}
    for label in labels:
        sizes[label] = sizes.get(label, 0) + 1
    large = [sizes[label] > threshold for label in labels]

    # A component within the threshold is one DRA owned by its smallest node
    small: Dict[int, Set[int]] = {}
    for x in range(n):
        if 1 < sizes[labels[x]] <= threshold:
            small.setdefault(labels[x], set()).add(x)
    branch_sets: Dict[int, List[Set[int]]] = {min(c): [c - {min(c)}] for c in small.values()}
    if any(large):
        branch_sets.update(_SketchReducer(g, large, threshold).branches())

    owner = list(range(n))
    branch_of = [-1] * n
    branches: Dict[int, List[Tuple[int, ...]]] = {}
    for u in sorted(branch_sets):
        ordered = sorted(tuple(sorted(s)) for s in branch_sets[u] if s)
        branches[u] = ordered
        for i, branch in enumerate(ordered):
            for x in branch:
                owner[x] = u
                branch_of[x] = i

    agent_dist: Dict[int, Dict[int, int]] = {}
    for u in tqdm(sorted(branches), desc="agent distances", disable=not progress):
        area = {u}.union(*branches[u])
        agent_dist[u] = dict(dijkstra(g, u, node_filter=area.__contains__))

    a = DraAssignment(owner, branch_of, branches, agent_dist, threshold)
    logger.info(
        f"Found {len(branches)} agents covering {a.member_count} of {n} nodes "
        f"(threshold {threshold})"
    )
    return a


def build_shrink_graph(g: WeightedGraph, a: DraAssignment) -> ShrinkGraph:
    nodes = [x for x in range(g.node_count) if a.owner[x] == x]
    graph, nodes = g.subgraph(nodes)
    logger.info(f"Shrink graph keeps {graph.node_count} nodes and {graph.edge_count} edges")
    return ShrinkGraph(graph, nodes)


def dra_distance(
    a: DraAssignment, g: WeightedGraph, s: int, t: int, stats: Optional[SearchStats] = None
) -> int:
    u = a.owner[s]
    if a.owner[t] != u:
        raise MisuseError(f"nodes {s} and {t} are represented by different agents")
    if s == t:
        return 0
    if s == u:
        return a.agent_dist[u][t]
    if t == u:
        return a.agent_dist[u][s]
    if a.branch_of[s] == a.branch_of[t]:
        branch = set(a.branches[u][a.branch_of[s]])
        branch.add(u)
        return dijkstra(g, s, targets=(t,), node_filter=branch.__contains__, stats=stats)[t]
    return a.agent_dist[u][s] + a.agent_dist[u][t]
