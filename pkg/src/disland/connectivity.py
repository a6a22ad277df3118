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
"""Cut nodes, biconnected components and the BC-sketch forest built on top of them."""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Tuple

from disland.graph import WeightedGraph


@dataclass(frozen=True)
class BccDecomposition:
    cut_nodes: FrozenSet[int]
    # Each BCC as its sorted (u, v) edges with u < v; isolated nodes get an empty edge list
    bccs: List[Tuple[Tuple[int, int], ...]]
    members: List[FrozenSet[int]]

    def __len__(self):
        return len(self.bccs)


@dataclass
class BcSketch:
    """Bipartite forest over cut nodes and BCCs.

    BCC vertex `b` carries `weights[b]` graph nodes. `bcc_cuts[b]` lists the cut nodes of
    BCC `b` and `cut_bccs[v]` the BCCs that cut node `v` belongs to.
    """

    cut_vertices: List[int]
    weights: List[int]
    members: List[FrozenSet[int]]
    bcc_cuts: List[List[int]] = field(default_factory=list)
    cut_bccs: Dict[int, List[int]] = field(default_factory=dict)

    @property
    def bcc_count(self) -> int:
        return len(self.weights)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(v, b) for b, cuts in enumerate(self.bcc_cuts) for v in cuts]

    def is_leaf(self, b: int) -> bool:
        return len(self.bcc_cuts[b]) == 1


def find_bccs(g: WeightedGraph) -> BccDecomposition:
    """Hopcroft–Tarjan with explicit stacks, so deep road graphs never hit the call limit."""
    n = g.node_count
    disc = [-1] * n
    low = [0] * n
    cut_nodes = set()
    bccs: List[Tuple[Tuple[int, int], ...]] = []
    members: List[FrozenSet[int]] = []
    clock = 0

    def close_component(edge_stack, parent, child):
        component = []
        while True:
            u, v = edge_stack.pop()
            component.append((u, v) if u < v else (v, u))
            if (u, v) == (parent, child):
                break
        component.sort()
        bccs.append(tuple(component))
        members.append(frozenset(x for e in component for x in e))

    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = clock
        clock += 1
        if g.degree(root) == 0:
            bccs.append(())
            members.append(frozenset((root,)))
            continue
        root_children = 0
        edge_stack: List[Tuple[int, int]] = []
        stack = [(root, -1, iter(g.neighbors(root)))]
        while stack:
            u, parent, neighbors = stack[-1]
            descended = False
            for v, _ in neighbors:
                if v == parent:
                    continue
                if disc[v] == -1:
                    edge_stack.append((u, v))
                    disc[v] = low[v] = clock
                    clock += 1
                    stack.append((v, u, iter(g.neighbors(v))))
                    descended = True
                    break
                if disc[v] < disc[u]:
                    # Back edge to an ancestor
                    edge_stack.append((u, v))
                    low[u] = min(low[u], disc[v])
            if descended:
                continue
            stack.pop()
            if parent == -1:
                continue
            low[parent] = min(low[parent], low[u])
            if low[u] >= disc[parent]:
                close_component(edge_stack, parent, u)
                if parent == root:
                    root_children += 1
                else:
                    cut_nodes.add(parent)
        if root_children >= 2:
            cut_nodes.add(root)

    return BccDecomposition(frozenset(cut_nodes), bccs, members)


def build_sketch(g: WeightedGraph, d: BccDecomposition) -> BcSketch:
    cut_vertices = sorted(d.cut_nodes)
    cut_bccs: Dict[int, List[int]] = {v: [] for v in cut_vertices}
    bcc_cuts: List[List[int]] = []
    for b, nodes in enumerate(d.members):
        cuts = sorted(v for v in nodes if v in d.cut_nodes)
        bcc_cuts.append(cuts)
        for v in cuts:
            cut_bccs[v].append(b)
    return BcSketch(
        cut_vertices=cut_vertices,
        weights=[len(nodes) for nodes in d.members],
        members=list(d.members),
        bcc_cuts=bcc_cuts,
        cut_bccs=cut_bccs,
    )
