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
from disland.oracle import DislandConfig, PreprocessedIndex, extra_space, preprocess, query


class DislandRouter:
    label = "DisLand"

    def __init__(
        self,
        g: WeightedGraph,
        index: Optional[PreprocessedIndex] = None,
        progress: bool = False,
        use_ch: bool = False,
        **_,
    ):
        self.g = g
        if index is None:
            start = time.perf_counter()
            index = preprocess(g, DislandConfig(), progress)
            self.preprocessing_seconds = time.perf_counter() - start
        else:
            self.preprocessing_seconds = sum(index.timings.values())
        self.index = index
        self.use_ch = use_ch
        self.extra_space_ratio = extra_space(index).ratio

    def distance(self, s: int, t: int, stats: Optional[SearchStats] = None) -> int:
        return query(self.index, self.g, s, t, use_ch=self.use_ch, stats=stats)
