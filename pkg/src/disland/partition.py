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
"""Bounded graph partitioning.

Fragments never exceed `gamma` nodes. The cut (number of cross-fragment edges) is kept low
with a multilevel scheme: heavy-edge matching to coarsen, greedy graph growing on the
coarsest level, then boundary refinement while projecting back.
"""
import heapq
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from disland.errors import ValidationError
from disland.graph import WeightedGraph

logger = logging.getLogger(__name__)

COARSEN_FLOOR = 64
# Coarsening stops once a level keeps more than this share of the previous one
STALL_RATIO = 0.95
MAX_REFINE_PASSES = 8

Adjacency = List[Dict[int, int]]


@dataclass(frozen=True)
class Partition:
    fragment_of: List[int]
    k: int
    gamma: int
    members: List[List[int]]
    boundary: List[List[int]]
    cross_edges: List[Tuple[int, int, int]]

    @classmethod
    def from_assignment(cls, g: WeightedGraph, fragment_of: Sequence[int], gamma: int):
        fragment_of = list(fragment_of)
        k = max(fragment_of, default=-1) + 1
        members: List[List[int]] = [[] for _ in range(k)]
        for x, i in enumerate(fragment_of):
            members[i].append(x)
        cross_edges = [(u, v, w) for u, v, w in g.edges() if fragment_of[u] != fragment_of[v]]
        on_boundary = sorted({x for u, v, _ in cross_edges for x in (u, v)})
        boundary: List[List[int]] = [[] for _ in range(k)]
        for x in on_boundary:
            boundary[fragment_of[x]].append(x)
        return cls(fragment_of, k, gamma, members, boundary, cross_edges)

    @property
    def node_count(self) -> int:
        return len(self.fragment_of)

    @property
    def boundary_nodes(self) -> List[int]:
        return sorted(x for nodes in self.boundary for x in nodes)

    def is_boundary(self, x: int) -> bool:
        return x in self.boundary[self.fragment_of[x]]


def fragment_count(node_count: int, gamma: int) -> int:
    """ceil(n / gamma), rounded up to a multiple of ten once it reaches ten."""
    k = math.ceil(node_count / gamma)
    return k if k < 10 else -(-k // 10) * 10


def _coarsen(adj: Adjacency, sizes: List[int], gamma: int):
    n = len(adj)
    mate = [-1] * n
    for u in range(n):
        if mate[u] != -1:
            continue
        best, best_conn = u, 0
        for v, c in adj[u].items():
            if mate[v] != -1 or sizes[u] + sizes[v] > gamma:
                continue
            if c > best_conn or (c == best_conn and v < best):
                best, best_conn = v, c
        mate[u], mate[best] = best, u

    coarse_of = [-1] * n
    m = 0
    for u in range(n):
        if coarse_of[u] == -1:
            coarse_of[u] = coarse_of[mate[u]] = m
            m += 1
    coarse_adj: Adjacency = [{} for _ in range(m)]
    coarse_sizes = [0] * m
    for u in range(n):
        cu = coarse_of[u]
        coarse_sizes[cu] += sizes[u]
        for v, c in adj[u].items():
            cv = coarse_of[v]
            if cu != cv:
                coarse_adj[cu][cv] = coarse_adj[cu].get(cv, 0) + c
    return coarse_adj, coarse_sizes, coarse_of


def _grow(adj: Adjacency, sizes: List[int], k: int, gamma: int):
    n = len(adj)
    target = min(gamma, -(-sum(sizes) // k))
    label = [-1] * n
    part_sizes: List[int] = []
    seed = 0
    while True:
        while seed < n and label[seed] != -1:
            seed += 1
        if seed == n:
            break
        p = len(part_sizes)
        part_sizes.append(0)
        conn: Dict[int, int] = {}
        frontier = [(0, seed)]
        while frontier:
            key, u = heapq.heappop(frontier)
            if label[u] != -1 or key != -conn.get(u, 0):
                continue
            if part_sizes[p] > 0 and part_sizes[p] + sizes[u] > target:
                continue
            label[u] = p
            part_sizes[p] += sizes[u]
            for v, c in adj[u].items():
                if label[v] == -1:
                    conn[v] = conn.get(v, 0) + c
                    heapq.heappush(frontier, (-conn[v], v))
    return label, part_sizes


def _cut(adj: Adjacency, label: List[int]) -> int:
    return sum(c for u in range(len(adj)) for v, c in adj[u].items() if label[u] != label[v]) // 2


def _refine(adj, sizes, label, part_sizes, gamma, cut, trace) -> int:
    """Move boundary nodes to the neighbouring fragment with the largest positive gain."""
    for _ in range(MAX_REFINE_PASSES):
        moved = False
        for u in range(len(adj)):
            own = label[u]
            conn: Dict[int, int] = {}
            for v, c in adj[u].items():
                conn[label[v]] = conn.get(label[v], 0) + c
            best, best_gain = None, 0
            for p in sorted(conn):
                gain = conn[p] - conn.get(own, 0)
                if p != own and gain > best_gain and part_sizes[p] + sizes[u] <= gamma:
                    best, best_gain = p, gain
            if best is None:
                continue
            label[u] = best
            part_sizes[own] -= sizes[u]
            part_sizes[best] += sizes[u]
            cut -= best_gain
            moved = True
            if trace is not None:
                trace.append(cut)
        if not moved:
            break
    return cut


def partition_bounded(
    g: WeightedGraph,
    gamma: int,
    k_hint: Optional[int] = None,
    *,
    weighted_cut: bool = False,
    trace: Optional[List[int]] = None,
) -> Partition:
    """Partition `g` into fragments of at most `gamma` nodes.

    Args:
        k_hint: fragment count to aim for; defaults to `fragment_count`.
        weighted_cut: minimise the summed edge weight across fragments instead of the
            number of cross edges.
        trace: receives the cut value before refinement and after every refinement move.
    """
    if gamma < 1:
        raise ValidationError(f"fragment size bound must be >= 1, got {gamma}")
    n = g.node_count
    if gamma >= n:
        return Partition.from_assignment(g, [0] * n, gamma)
    k = k_hint if k_hint else fragment_count(n, gamma)

    adj: Adjacency = [
        {v: (w if weighted_cut else 1) for v, w in g.neighbors(u)} for u in range(n)
    ]
    sizes = [1] * n
    levels = []
    while len(adj) > max(2 * k, COARSEN_FLOOR):
        coarse_adj, coarse_sizes, coarse_of = _coarsen(adj, sizes, gamma)
        if len(coarse_adj) > STALL_RATIO * len(adj):
            break
        levels.append((adj, sizes, coarse_of))
        adj, sizes = coarse_adj, coarse_sizes
    logger.debug(f"Coarsened {n} nodes to {len(adj)} over {len(levels)} levels")

    label, part_sizes = _grow(adj, sizes, k, gamma)
    cut = _cut(adj, label)
    if trace is not None:
        trace.append(cut)
    cut = _refine(adj, sizes, label, part_sizes, gamma, cut, trace)
    for fine_adj, fine_sizes, coarse_of in reversed(levels):
        label = [label[coarse_of[u]] for u in range(len(fine_adj))]
        cut = _refine(fine_adj, fine_sizes, label, part_sizes, gamma, cut, trace)

    compact: Dict[int, int] = {}
    fragment_of = [compact.setdefault(p, len(compact)) for p in label]
    p = Partition.from_assignment(g, fragment_of, gamma)
    logger.info(f"Partitioned {n} nodes into {p.k} fragments (gamma {gamma}, cut {cut})")
    return p


def boundary_fraction(p: Partition, epsilon: Optional[float] = None) -> Fraction:
    if p.node_count == 0:
        return Fraction(0)
    fraction = Fraction(len(p.boundary_nodes), p.node_count)
    if epsilon is not None and fraction > epsilon:
        logger.warning(
            f"Boundary nodes make up {float(fraction):.2%} of the graph, above {epsilon:.2%}"
        )
    return fraction
