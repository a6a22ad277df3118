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
import time
from typing import Optional

from disland.graph import SearchStats, WeightedGraph
from disland.oracle import PreprocessedIndex, agent_distance
from disland.routers import agent_layer, space_ratio
from disland.speedups import ch_build, ch_query


class AgentChRouter:
    label = "Agent + CH"

    def __init__(
        self,
        g: WeightedGraph,
        index: Optional[PreprocessedIndex] = None,
        progress: bool = False,
        **_,
    ):
        self.g = g
        self.dra, self.shrink, seconds = agent_layer(g, index)
        if index is not None and index.ch is not None:
            self.ch = index.ch
            seconds += index.timings.get("contraction", 0.0)
        else:
            start = time.perf_counter()
            self.ch = ch_build(self.shrink.graph, progress=progress)
            seconds += time.perf_counter() - start
        self.preprocessing_seconds = seconds
        self.extra_space_ratio = space_ratio(g, self.dra.member_count + self.ch.shortcut_count)

    def distance(self, s: int, t: int, stats: Optional[SearchStats] = None) -> int:
        def shrink_distance(a, b):
            return ch_query(self.ch, self.shrink.graph, a, b, stats)

        return agent_distance(self.dra, self.shrink, self.g, s, t, shrink_distance, stats)
