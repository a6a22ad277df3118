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
"""Arc-flags: one bit per region on every edge, set when the edge lies on a shortest path
into that region."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from disland.graph import DistanceMap, SearchStats, WeightedGraph, dijkstra, search
from disland.partition import Partition

logger = logging.getLogger(__name__)

Flags = Dict[Tuple[int, int], int]


@dataclass(frozen=True)
class ArcFlagIndex:
    region_of: List[int]
    k: int
    # Flags of the undirected edge (u, v), u < v, as a k-bit mask; both directions OR-ed
    flags: Flags
    # Built from order rising or turning shortest paths only
    rank_filtered: bool = False

    def allows(self, u: int, v: int, region: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return bool(self.flags.get(key, 0) >> region & 1)

    @property
    def bit_count(self) -> int:
        return self.k * len(self.flags)


def _flag_dag(g: WeightedGraph, dist: DistanceMap, flags: Flags, bit: int):
    for u, v, w in g.edges():
        du, dv = dist[u], dist[v]
        if du + w == dv or dv + w == du:
            flags[(u, v)] |= bit


def _flag_ranked_dag(
    g: WeightedGraph, dist: DistanceMap, source: int, rank: Sequence[int], flags: Flags, bit: int
):
    """Flag the shortest-path DAG edges reachable from `source` while ranks first rise and
    then fall. Walked backwards from the target region, these are the order rising or
    turning shortest paths into it."""
    # Phase 0 still climbs away from the source, phase 1 descends
    phases: Dict[int, set] = {source: {0}}
    for y in sorted(dist, key=lambda x: (dist[x], x)):
        for phase in phases.get(y, ()):
            for z, w in g.neighbors(y):
                if dist.get(z) != dist[y] + w:
                    continue
                if rank[z] > rank[y]:
                    if phase == 1:
                        continue
                    step = 0
                else:
                    step = 1
                phases.setdefault(z, set()).add(step)
                flags[(y, z) if y < z else (z, y)] |= bit


def arcflags_build(
    g: WeightedGraph,
    regions: Partition,
    order: Optional[Sequence[int]] = None,
    progress: bool = False,
) -> ArcFlagIndex:
    """Grow a shortest-path DAG from every boundary node of every region.

    Args:
        order: contraction rank of every node. When given, only DAG edges on order rising
            or turning paths are flagged, so the flags are complete for rank-restricted
            searches only.
    """
    flags: Flags = {}
    region_of = regions.fragment_of
    for u, v, _ in g.edges():
        flags[(u, v)] = 1 << region_of[u] if region_of[u] == region_of[v] else 0

    sources = [(i, b) for i in range(regions.k) for b in regions.boundary[i]]
    for i, b in tqdm(sources, desc="arc flags", disable=not progress):
        dist = dijkstra(g, b)
        if order is None:
            _flag_dag(g, dist, flags, 1 << i)
        else:
            _flag_ranked_dag(g, dist, b, order, flags, 1 << i)
    idx = ArcFlagIndex(list(region_of), regions.k, flags, order is not None)
    logger.info(f"Arc flags over {regions.k} regions use {idx.bit_count} bits")
    return idx


def arcflags_query(
    idx: ArcFlagIndex, g: WeightedGraph, s: int, t: int, stats: Optional[SearchStats] = None
) -> int:
    region = idx.region_of[t]

    def flagged(u):
        return ((v, w) for v, w in g.neighbors(u) if idx.allows(u, v, region))

    return search(flagged, s, targets=(t,), stats=stats)[t]
