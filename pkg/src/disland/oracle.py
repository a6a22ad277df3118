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
"""Preprocessing pipeline and bi-level distance queries.

Level one answers queries inside a DRA from the agent tables. Level two searches the
fragments of the two agents joined by the super graph, optionally restricted to
rank-increasing edges of the contraction hierarchy and pruned by arc flags.
"""
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from disland.agents import (
    AgentConfig,
    DraAssignment,
    ShrinkGraph,
    build_shrink_graph,
    compute_dras,
    dra_distance,
)
from disland.errors import MisuseError, ValidationError
from disland.graph import (
    UNREACHABLE,
    SearchStats,
    WeightedGraph,
    add_distances,
    graph_checksum,
    search,
)
from disland.partition import Partition, boundary_fraction, partition_bounded
from disland.speedups import ArcFlagIndex, ChIndex, arcflags_build, ch_build
from disland.supergraph import SuperGraph, build_supergraph, union_neighbors

logger = logging.getLogger(__name__)

# Bytes per stored (node id, distance) record and per node offset
EDGE_RECORD_BYTES = 8
OFFSET_BYTES = 4


@dataclass(frozen=True)
class DislandConfig:
    c: int = 2
    epsilon: float = 0.10
    use_ch: bool = True
    use_arcflags: bool = True
    k_hint: Optional[int] = None
    # Arc flags over order rising or turning paths only; needs the hierarchy
    rank_filtered_flags: bool = False

    def __post_init__(self):
        if self.c < 1:
            raise ValidationError(f"agent constant c must be >= 1, got {self.c}")
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.k_hint is not None and self.k_hint < 1:
            raise ValidationError(f"fragment count hint must be >= 1, got {self.k_hint}")
        if self.rank_filtered_flags and not (self.use_ch and self.use_arcflags):
            raise ValidationError("rank-filtered arc flags need both CH and arc flags enabled")

    @property
    def agent_config(self) -> AgentConfig:
        return AgentConfig(self.c)

    def gamma(self, node_count: int) -> int:
        return max(1, self.c * math.isqrt(node_count))


@dataclass(frozen=True)
class PreprocessedIndex:
    config: DislandConfig
    node_count: int
    edge_count: int
    checksum: str
    dra: DraAssignment
    shrink: ShrinkGraph
    partition: Partition
    supergraph: SuperGraph
    ch: Optional[ChIndex] = None
    arcflags: Optional[ArcFlagIndex] = None
    # Second-level region of every first-level fragment
    fragment_region: List[int] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def super_local(self) -> Dict[int, int]:
        return self.supergraph.local_of


@dataclass(frozen=True)
class ExtraSpaceReport:
    dra_edges: int = 0
    supergraph_enforced: int = 0
    ch_shortcuts: int = 0
    arcflag_bits: int = 0
    source_bytes: int = 0

    @property
    def extra_bytes(self) -> int:
        records = self.dra_edges + self.supergraph_enforced + self.ch_shortcuts
        return EDGE_RECORD_BYTES * records + -(-self.arcflag_bits // 8)

    @property
    def ratio(self) -> float:
        return self.extra_bytes / self.source_bytes if self.source_bytes else 0.0


def source_bytes(node_count: int, edge_count: int) -> int:
    """Adjacency-list size of a graph: one offset per node and both arcs of every edge."""
    return OFFSET_BYTES * node_count + 2 * EDGE_RECORD_BYTES * edge_count


@contextmanager
def _timed(timings: Dict[str, float], stage: str):
    start = time.perf_counter()
    yield
    timings[stage] = time.perf_counter() - start
    logger.debug(f"{stage} took {timings[stage]:.3f}s")


def region_count(fragment_count: int) -> int:
    """Second-level region count; every fragment is its own region below 100 fragments."""
    m = fragment_count
    k = (m // 1000) * 100 if m > 1000 else (m // 100) * 10
    return k if k > 0 else m


def _region_partition(p: Partition) -> List[int]:
    m = p.k
    k = region_count(m)
    if k >= m:
        return list(range(m))
    counts: Dict[Tuple[int, int], int] = {}
    for u, v, _ in p.cross_edges:
        a, b = sorted((p.fragment_of[u], p.fragment_of[v]))
        counts[(a, b)] = counts.get((a, b), 0) + 1
    quotient = WeightedGraph(m, ((a, b, c) for (a, b), c in counts.items()))
    return partition_bounded(quotient, math.ceil(m / k), k, weighted_cut=True).fragment_of


def _super_arcflags(
    p: Partition, sg: SuperGraph, rank: Optional[Sequence[int]], progress: bool
):
    fragment_region = _region_partition(p)
    graph = sg.as_graph()
    region_of = [fragment_region[p.fragment_of[x]] for x in sg.nodes]
    regions = Partition.from_assignment(graph, region_of, gamma=max(graph.node_count, 1))
    order = None if rank is None else [rank[x] for x in sg.nodes]
    return arcflags_build(graph, regions, order, progress), fragment_region


def preprocess(
    g: WeightedGraph, cfg: DislandConfig = DislandConfig(), progress: bool = False
) -> PreprocessedIndex:
    timings: Dict[str, float] = {}
    with _timed(timings, "agents"):
        dra = compute_dras(g, cfg.agent_config, progress)
        shrink = build_shrink_graph(g, dra)
    ch = None
    if cfg.use_ch:
        with _timed(timings, "contraction"):
            ch = ch_build(shrink.graph, progress=progress)
    with _timed(timings, "partition"):
        partition = partition_bounded(shrink.graph, cfg.gamma(g.node_count), cfg.k_hint)
        boundary_fraction(partition, cfg.epsilon)
    with _timed(timings, "supergraph"):
        supergraph = build_supergraph(
            shrink.graph, partition, None if ch is None else ch.rank, progress
        )
    arcflags, fragment_region = None, []
    if cfg.use_arcflags:
        with _timed(timings, "arcflags"):
            rank = ch.rank if cfg.rank_filtered_flags else None
            arcflags, fragment_region = _super_arcflags(partition, supergraph, rank, progress)
    logger.info(f"Preprocessing finished in {sum(timings.values()):.2f}s")
    return PreprocessedIndex(
        config=cfg,
        node_count=g.node_count,
        edge_count=g.edge_count,
        checksum=graph_checksum(g),
        dra=dra,
        shrink=shrink,
        partition=partition,
        supergraph=supergraph,
        ch=ch,
        arcflags=arcflags,
        fragment_region=fragment_region,
        timings=timings,
    )


def agent_distance(
    dra: DraAssignment,
    shrink: ShrinkGraph,
    g: WeightedGraph,
    s: int,
    t: int,
    shrink_distance: Callable[[int, int], int],
    stats: Optional[SearchStats] = None,
) -> int:
    """dist(s, u_s) + dist(u_s, u_t) + dist(u_t, t), with the middle term delegated to
    `shrink_distance` over shrink-graph ids."""
    for x in (s, t):
        if not 0 <= x < g.node_count:
            raise ValidationError(f"node {x} outside [0, {g.node_count})")
    if s == t:
        return 0
    us, ut = dra.owner[s], dra.owner[t]
    if us == ut:
        return dra_distance(dra, g, s, t, stats)
    head = 0 if s == us else dra.agent_dist[us][s]
    tail = 0 if t == ut else dra.agent_dist[ut][t]
    local = shrink.local_of
    return add_distances(head, shrink_distance(local[us], local[ut]), tail)


def _union_neighbors(idx: PreprocessedIndex, s: int, t: int, use_arcflags: bool, target: int):
    """Neighbours over G[V_s] + G[V_t] + super graph, super edges pruned towards `target`."""
    p = idx.partition
    allow = None
    if use_arcflags:
        flags, local = idx.arcflags, idx.super_local
        region = idx.fragment_region[p.fragment_of[target]]

        def allow(u, v):
            return flags.allows(local[u], local[v], region)

    fragments = (p.fragment_of[s], p.fragment_of[t])
    return union_neighbors(idx.shrink.graph, p, idx.supergraph, fragments, allow)


def _upward(ch: ChIndex, neighbors):
    rank = ch.rank

    def up(u):
        best = dict(ch.up(u))
        for v, w in neighbors(u):
            if rank[v] > rank[u] and w < best.get(v, UNREACHABLE):
                best[v] = w
        return best.items()

    return up


def _union_distance(
    idx: PreprocessedIndex, s: int, t: int, use_ch: bool, use_arcflags: bool, stats
) -> int:
    """Dijkstra over the union graph, or with `use_ch` two upward searches over the union
    graph laid on the hierarchy's upward arcs, meeting at the cheapest common node."""
    forward = _union_neighbors(idx, s, t, use_arcflags, t)
    if not use_ch:
        return search(forward, s, targets=(t,), stats=stats)[t]
    backward = _union_neighbors(idx, s, t, use_arcflags, s)
    ahead = search(_upward(idx.ch, forward), s, stats=stats)
    behind = search(_upward(idx.ch, backward), t, stats=stats)
    if len(behind) < len(ahead):
        ahead, behind = behind, ahead
    return min((d + behind[x] for x, d in ahead.items() if x in behind), default=UNREACHABLE)


def query(
    idx: PreprocessedIndex,
    g: WeightedGraph,
    s: int,
    t: int,
    *,
    use_ch: bool = False,
    use_arcflags: Optional[bool] = None,
    stats: Optional[SearchStats] = None,
) -> int:
    """Exact dist(s, t).

    The shrink-graph leg runs Dijkstra over the union graph; `use_ch` restricts it to
    rank-increasing edges. Arc flags prune super-graph edges whenever the index holds flags
    valid for the chosen search, unless `use_arcflags` says otherwise.
    """
    if g.node_count != idx.node_count:
        raise MisuseError(f"index covers {idx.node_count} nodes, graph has {g.node_count}")
    if use_ch and idx.ch is None:
        raise MisuseError("index was built without a contraction hierarchy")
    flags = idx.arcflags
    if use_arcflags is None:
        use_arcflags = flags is not None and (use_ch or not flags.rank_filtered)
    elif use_arcflags:
        if flags is None:
            raise MisuseError("index was built without arc flags")
        if flags.rank_filtered and not use_ch:
            raise MisuseError("rank-filtered arc flags only serve the CH-restricted search")

    def shrink_distance(a, b):
        return _union_distance(idx, a, b, use_ch, use_arcflags, stats)

    return agent_distance(idx.dra, idx.shrink, g, s, t, shrink_distance, stats)


def extra_space(idx: Optional[PreprocessedIndex]) -> ExtraSpaceReport:
    if idx is None:
        return ExtraSpaceReport()
    return ExtraSpaceReport(
        dra_edges=idx.dra.member_count,
        supergraph_enforced=idx.supergraph.enforced_count,
        ch_shortcuts=0 if idx.ch is None else idx.ch.shortcut_count,
        arcflag_bits=0 if idx.arcflags is None else idx.arcflags.bit_count,
        source_bytes=source_bytes(idx.node_count, idx.edge_count),
    )
