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
from typing import Dict, List, Optional, Tuple

from disland.agents import (
    AgentConfig,
    DraAssignment,
    ShrinkGraph,
    build_shrink_graph,
    compute_dras,
)
from disland.graph import WeightedGraph
from disland.oracle import EDGE_RECORD_BYTES, PreprocessedIndex, source_bytes


def available_routers() -> List:
    import os.path
    import pkgutil

    pkgpath = os.path.dirname(__file__)
    return [name for _, name, _ in pkgutil.iter_modules([pkgpath])]


def index_routers() -> List:
    """Routers that reuse a preprocessed DisLand index when one is given."""
    return ["agent_arcflag", "agent_ch", "agent_dijkstra", "disland", "disland_ch"]


def router_types() -> Dict:
    import ast
    import importlib.util

    routers = available_routers()
    _types = {}
    for router in routers:
        script = importlib.util.find_spec(f".{router}", __name__).origin
        with open(script) as f:
            tree = ast.parse(f.read(), script)
            classes = [cls for cls in tree.body if isinstance(cls, ast.ClassDef)]
            _types[router] = classes[0].name  # one router class per module
    return _types


def router_factory(router: str, g: WeightedGraph, *args, **kwargs):
    import importlib

    router_type = router_types()[router]
    module = importlib.import_module(f".{router}", __name__)
    assert hasattr(module, router_type), f"{router_type} is not defined in {module}"
    return getattr(module, router_type)(g, *args, **kwargs)


def agent_layer(
    g: WeightedGraph, index: Optional[PreprocessedIndex] = None, c: int = 2
) -> Tuple[DraAssignment, ShrinkGraph, float]:
    """DRAs and shrink graph, taken from `index` when available, with their build time."""
    if index is not None:
        return index.dra, index.shrink, index.timings.get("agents", 0.0)
    start = time.perf_counter()
    dra = compute_dras(g, AgentConfig(c))
    shrink = build_shrink_graph(g, dra)
    return dra, shrink, time.perf_counter() - start


def space_ratio(g: WeightedGraph, extra_records: int, extra_bits: int = 0) -> float:
    extra = EDGE_RECORD_BYTES * extra_records + -(-extra_bits // 8)
    return extra / max(source_bytes(g.node_count, g.edge_count), 1)
