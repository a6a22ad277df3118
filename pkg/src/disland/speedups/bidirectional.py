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
import heapq
from typing import Optional

from disland.graph import UNREACHABLE, Neighbors, SearchStats, WeightedGraph


def bidirectional_search(
    forward: Neighbors,
    backward: Neighbors,
    s: int,
    t: int,
    stats: Optional[SearchStats] = None,
) -> int:
    """Alternate forward and backward settles until the two queue heads cannot beat the best
    meeting value seen so far."""
    if s == t:
        return 0
    neighbors = (forward, backward)
    dist = ({s: 0}, {t: 0})
    settled = (set(), set())
    heaps = ([(0, s)], [(0, t)])
    best = UNREACHABLE
    side = 0
    while heaps[0] and heaps[1]:
        if heaps[0][0][0] + heaps[1][0][0] >= best:
            break
        d, u = heapq.heappop(heaps[side])
        if u in settled[side]:
            continue
        settled[side].add(u)
        other = dist[1 - side]
        if u in other:
            best = min(best, d + other[u])
        for v, w in neighbors[side](u):
            nd = d + w
            if nd < dist[side].get(v, UNREACHABLE):
                dist[side][v] = nd
                heapq.heappush(heaps[side], (nd, v))
                if v in other:
                    best = min(best, nd + other[v])
        side = 1 - side
    if stats is not None:
        stats.settled += len(settled[0]) + len(settled[1])
    return best


def bidirectional_dijkstra(
    g: WeightedGraph, s: int, t: int, stats: Optional[SearchStats] = None
) -> int:
    return bidirectional_search(g.neighbors, g.neighbors, s, t, stats)
