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
import dataclasses
import logging
import time
from typing import Optional

from disland.graph import WeightedGraph
from disland.oracle import PreprocessedIndex
from disland.routers.disland import DislandRouter
from disland.speedups import ch_build

logger = logging.getLogger(__name__)


class DislandChRouter(DislandRouter):
    """DisLand with the union-graph search restricted to rank-increasing edges."""

    label = "DisLand + CH"

    def __init__(
        self,
        g: WeightedGraph,
        index: Optional[PreprocessedIndex] = None,
        progress: bool = False,
        **_,
    ):
        if index is not None and index.ch is None:
            logger.info("Index holds no contraction hierarchy, building one over the shrink graph")
            start = time.perf_counter()
            ch = ch_build(index.shrink.graph, progress=progress)
            timings = dict(index.timings, contraction=time.perf_counter() - start)
            index = dataclasses.replace(index, ch=ch, timings=timings)
        super().__init__(g, index, progress, use_ch=True)
