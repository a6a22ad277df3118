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
"""Contraction hierarchies with exact witness searches."""
import heapq
import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from disland.errors import ValidationError
from disland.graph import UNREACHABLE, SearchStats, WeightedGraph, search

logger = logging.getLogger(__name__)

# (u, w) with u < w -> (weight, contracted middle node)
Shortcuts = Dict[Tuple[int, int], Tuple[int, int]]


class ChIndex:
    """Node ranks plus the shortcut overlay, with the upward view materialised.

    `rank[v]` is the position of `v` in the contraction order, so higher ranks are more
    important. `up(u)` lists neighbours of higher rank over base edges and shortcuts.
    """

    def __init__(self, g: WeightedGraph, rank: Sequence[int], shortcuts: Shortcuts):
        self.rank = list(rank)
        self.shortcuts = dict(sorted(shortcuts.items()))
        upward: List[Dict[int, int]] = [{} for _ in range(g.node_count)]
        arcs = list(g.edges()) + [(u, v, w) for (u, v), (w, _) in self.shortcuts.items()]
        for u, v, w in arcs:
            low, high = (u, v) if self.rank[u] < self.rank[v] else (v, u)
            if w < upward[low].get(high, UNREACHABLE):
                upward[low][high] = w
        self._up = [sorted(adjacency.items()) for adjacency in upward]

    def __len__(self):
        return len(self.rank)

    @property
    def order(self) -> List[int]:
        """Nodes in contraction order."""
        return sorted(range(len(self.rank)), key=self.rank.__getitem__)

    @property
    def shortcut_count(self) -> int:
        return len(self.shortcuts)

    def up(self, u: int) -> List[Tuple[int, int]]:
        return self._up[u]


class _Contractor:
    def __init__(self, g: WeightedGraph):
        self.overlay = [dict(g.neighbors(u)) for u in range(g.node_count)]
        self.deleted_neighbors = [0] * g.node_count
        self.shortcuts: Shortcuts = {}

    def needed_shortcuts(self, v: int) -> List[Tuple[int, int, int]]:
        """Shortcuts (u, w, via) for which u-v-w is the only shortest path left."""

        def avoiding_v(x):
            return ((y, w) for y, w in self.overlay[x].items() if y != v)

        def overlay(x):
            return self.overlay[x].items()

        around = sorted(self.overlay[v].items())
        needed = []
        for i, (u, wu) in enumerate(around):
            others = around[i + 1 :]
            if not others:
                break
            targets = [w for w, _ in others]
            bound = wu + max(ww for _, ww in others)
            shortest = search(overlay, u, targets=targets, bound=bound)
            witness = search(avoiding_v, u, targets=targets, bound=bound)
            needed.extend(
                (u, w, wu + ww)
                for w, ww in others
                if shortest[w] == wu + ww and witness[w] > wu + ww
            )
        return needed

    def priority(self, v: int) -> int:
        return (
            len(self.needed_shortcuts(v)) - len(self.overlay[v]) + self.deleted_neighbors[v]
        )

    def contract(self, v: int):
        for u, w, via in self.needed_shortcuts(v):
            self.overlay[u][w] = self.overlay[w][u] = via
            self.shortcuts[(u, w) if u < w else (w, u)] = (via, v)
        for u in self.overlay[v]:
            del self.overlay[u][v]
            self.deleted_neighbors[u] += 1
        self.overlay[v] = {}


def ch_build(
    g: WeightedGraph, order: Optional[Sequence[int]] = None, progress: bool = False
) -> ChIndex:
    """Contract every node of `g`.

    Args:
        order: nodes in the order to contract them; by default a lazily updated priority
            (shortcuts added minus edges removed plus contracted neighbours) decides, ties
            to the smaller id.
    """
    n = g.node_count
    contractor = _Contractor(g)
    rank = [-1] * n
    if order is not None:
        if sorted(order) != list(range(n)):
            raise ValidationError("contraction order must list every node exactly once")
        for r, v in enumerate(tqdm(order, desc="contraction", disable=not progress)):
            contractor.contract(v)
            rank[v] = r
    else:
        heap = [(contractor.priority(v), v) for v in range(n)]
        heapq.heapify(heap)
        with tqdm(total=n, desc="contraction", disable=not progress) as bar:
            r = 0
            while heap:
                _, v = heapq.heappop(heap)
                if rank[v] != -1:
                    continue
                current = (contractor.priority(v), v)
                if heap and current > heap[0]:
                    heapq.heappush(heap, current)
                    continue
                contractor.contract(v)
                rank[v] = r
                r += 1
                bar.update()
    idx = ChIndex(g, rank, contractor.shortcuts)
    logger.info(f"Contraction hierarchy over {n} nodes added {idx.shortcut_count} shortcuts")
    return idx


def ch_query(
    idx: ChIndex, g: WeightedGraph, s: int, t: int, stats: Optional[SearchStats] = None
) -> int:
    """Meet-in-the-middle over two upward searches."""
    for x in (s, t):
        if not 0 <= x < g.node_count:
            raise ValidationError(f"node {x} outside [0, {g.node_count})")
    if s == t:
        return 0
    forward = search(idx.up, s, stats=stats)
    backward = search(idx.up, t, stats=stats)
    if len(backward) < len(forward):
        forward, backward = backward, forward
    return min((d + backward[x] for x, d in forward.items() if x in backward), default=UNREACHABLE)


class PathShape(Enum):
    RISING = "rising"
    TURNING = "turning"
    NEITHER = "neither"


def classify_path(rank: Sequence[int], path: Sequence[int]) -> PathShape:
    """Shape of `path` under the contraction ranks: strictly rising, rising to a single
    interior peak and then strictly falling, or neither."""
    ranks = [rank[x] for x in path]
    peak = max(range(len(ranks)), key=ranks.__getitem__, default=0)
    rising = all(a < b for a, b in zip(ranks[:peak], ranks[1 : peak + 1]))
    falling = all(a > b for a, b in zip(ranks[peak:], ranks[peak + 1 :]))
    if rising and peak == len(ranks) - 1:
        return PathShape.RISING
    if rising and falling and peak > 0:
        return PathShape.TURNING
    return PathShape.NEITHER
