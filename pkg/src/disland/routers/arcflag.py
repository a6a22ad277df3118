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
import math
import time
from typing import Optional

from disland.graph import SearchStats, WeightedGraph
from disland.partition import partition_bounded
from disland.routers import space_ratio
from disland.speedups import ArcFlagIndex, arcflags_build, arcflags_query

REGION_COUNT = 64


def build_region_flags(g: WeightedGraph, progress: bool = False) -> ArcFlagIndex:
    gamma = max(1, math.ceil(g.node_count / REGION_COUNT))
    return arcflags_build(g, partition_bounded(g, gamma, REGION_COUNT), progress=progress)


class ArcFlagRouter:
    label = "ArcFlag"

    def __init__(self, g: WeightedGraph, *_, progress: bool = False, **__):
        self.g = g
        start = time.perf_counter()
        self.flags = build_region_flags(g, progress)
        self.preprocessing_seconds = time.perf_counter() - start
        self.extra_space_ratio = space_ratio(g, 0, self.flags.bit_count)

    def distance(self, s: int, t: int, stats: Optional[SearchStats] = None) -> int:
        return arcflags_query(self.flags, self.g, s, t, stats)
