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
from typing import Optional

from disland.graph import SearchStats, WeightedGraph, dijkstra
from disland.oracle import PreprocessedIndex, agent_distance
from disland.routers import agent_layer, space_ratio


class AgentDijkstraRouter:
    label = "Agent + Dijkstra"

    def __init__(self, g: WeightedGraph, index: Optional[PreprocessedIndex] = None, **_):
        self.g = g
        self.dra, self.shrink, self.preprocessing_seconds = agent_layer(g, index)
        self.extra_space_ratio = space_ratio(g, self.dra.member_count)

    def distance(self, s: int, t: int, stats: Optional[SearchStats] = None) -> int:
        def shrink_distance(a, b):
            return dijkstra(self.shrink.graph, a, targets=(b,), stats=stats)[b]

        return agent_distance(self.dra, self.shrink, self.g, s, t, shrink_distance, stats)
