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
"""Benchmark harness and index statistics."""
import csv
import hashlib
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO

from rich.table import Table
from tqdm import tqdm

from disland.connectivity import find_bccs
from disland.datasets.workload import QueryWorkload
from disland.errors import ExactnessError, ValidationError
from disland.graph import SearchStats, WeightedGraph
from disland.oracle import PreprocessedIndex, extra_space
from disland.routers import available_routers, router_factory

logger = logging.getLogger(__name__)

# Benchmark order; the first selected algorithm is the reference for the exactness check
ALGORITHMS = [
    "dijkstra",
    "bidi",
    "ch",
    "arcflag",
    "agent_dijkstra",
    "agent_ch",
    "agent_arcflag",
    "disland",
    "disland_ch",
]

Rows = List[Dict[str, object]]


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    query_set: int
    queries: int
    mean_time_us: float
    mean_settled: float
    checksum: str


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)
    preprocessing_seconds: Dict[str, float] = field(default_factory=dict)
    extra_space_ratio: Dict[str, float] = field(default_factory=dict)
    metric: str = ""

    def __len__(self):
        return len(self.rows)

    def checksums(self, algorithm: str) -> Dict[int, str]:
        return {r.query_set: r.checksum for r in self.rows if r.algorithm == algorithm}

    def as_rows(self) -> Rows:
        return [
            dict(
                asdict(r),
                preprocessing_seconds=round(self.preprocessing_seconds[r.algorithm], 6),
                extra_space_ratio=round(self.extra_space_ratio[r.algorithm], 6),
                metric=self.metric,
            )
            for r in self.rows
        ]


def result_checksum(distances: Sequence[int]) -> str:
    return hashlib.sha1("\n".join(map(str, distances)).encode()).hexdigest()[:16]


def selected_algorithms(algos: Optional[Sequence[str]]) -> List[str]:
    if not algos:
        return list(ALGORITHMS)
    known = available_routers()
    unknown = [a for a in algos if a not in known]
    if unknown:
        raise ValidationError(f"unknown algorithms {unknown}, choose from {sorted(known)}")
    return list(dict.fromkeys(algos))


def bench(
    g: WeightedGraph,
    idx: Optional[PreprocessedIndex],
    workload: QueryWorkload,
    algos: Optional[Sequence[str]] = None,
    progress: bool = False,
) -> BenchReport:
    """Time every selected algorithm over every query set and cross-check the answers.

    Raises:
        ExactnessError: an algorithm disagrees with the first one on some query set. The
            report collected so far rides along on the exception.
    """
    report = BenchReport(metric=workload.metric.value)
    if len(workload) == 0:
        logger.warning("Workload holds no queries, nothing to benchmark")
        return report

    reference = None
    for name in selected_algorithms(algos):
        router = router_factory(name, g, index=idx, progress=progress)
        report.preprocessing_seconds[name] = router.preprocessing_seconds
        report.extra_space_ratio[name] = router.extra_space_ratio
        for i, pairs in enumerate(workload.sets, start=1):
            if not pairs:
                continue
            stats = SearchStats()
            distances = []
            elapsed = 0.0
            for s, t in tqdm(pairs, desc=f"{name} Q{i}", disable=not progress, leave=False):
                start = time.perf_counter()
                distances.append(router.distance(s, t, stats))
                elapsed += time.perf_counter() - start
            report.rows.append(
                BenchRow(
                    algorithm=name,
                    query_set=i,
                    queries=len(pairs),
                    mean_time_us=1e6 * elapsed / len(pairs),
                    mean_settled=stats.settled / len(pairs),
                    checksum=result_checksum(distances),
                )
            )
        logger.info(f"Benchmarked {router.label} over {len(workload)} queries")

        if reference is None:
            reference = name
            continue
        expected, got = report.checksums(reference), report.checksums(name)
        wrong = sorted(i for i in expected if got.get(i) != expected[i])
        if wrong:
            raise ExactnessError(
                f"{name} disagrees with {reference} on query sets {wrong}", report=report
            )
    return report


def _pct(part: int, whole: int) -> float:
    return round(100.0 * part / whole, 2) if whole else 0.0


def stats(g: WeightedGraph, idx: PreprocessedIndex) -> Dict[str, Rows]:
    """One table per structure of the index, as lists of CSV-ready rows."""
    n, m = g.node_count, g.edge_count
    dra, p, sg = idx.dra, idx.partition, idx.supergraph
    bccs = find_bccs(g)
    tables: Dict[str, Rows] = {}
    tables["agents"] = [
        {
            "agents": len(dra.agents),
            "agents_pct": _pct(len(dra.agents), n),
            "dra_members": dra.member_count,
            "dra_members_pct": _pct(dra.member_count, n),
            "threshold": dra.threshold,
            "seconds": round(idx.timings.get("agents", 0.0), 6),
        }
    ]
    tables["bcc"] = [
        {
            "bccs": len(bccs),
            "cut_nodes": len(bccs.cut_nodes),
            "largest_bcc": max((len(x) for x in bccs.members), default=0),
        }
    ]
    boundary = len(p.boundary_nodes)
    tables["partition"] = [
        {
            "fragments": p.k,
            "gamma": p.gamma,
            "avg_fragment_size": round(p.node_count / p.k, 2) if p.k else 0.0,
            "avg_boundary": round(boundary / p.k, 2) if p.k else 0.0,
            "boundary_pct": _pct(boundary, p.node_count),
        }
    ]
    tables["fragments"] = [
        {
            "fragment": i,
            "size": len(p.members[i]),
            "boundary": len(p.boundary[i]),
            "landmarks": len(sg.fragment_landmarks[i]),
            "enforced_edges": sg.fragment_enforced[i],
        }
        for i in range(p.k)
    ]
    tables["supergraph"] = [
        {
            "nodes": sg.node_count,
            "nodes_pct": _pct(sg.node_count, n),
            "edges": sg.edge_count,
            "edges_pct": _pct(sg.edge_count, m),
            "enforced_edges": sg.enforced_count,
        }
    ]
    space = extra_space(idx)
    tables["space"] = [
        dict(asdict(space), extra_bytes=space.extra_bytes, ratio=round(space.ratio, 6))
    ]
    return tables


def write_csv(rows: Rows, stream: TextIO):
    if not rows:
        return
    writer = csv.DictWriter(stream, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def write_tables(tables: Dict[str, Rows], directory: Path, prefix: str = "") -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, rows in tables.items():
        path = directory / f"{prefix}{name}.csv"
        with open(path, "w", newline="") as f:
            write_csv(rows, f)
        written.append(path)
    return written


def render_table(title: str, rows: Rows) -> Table:
    table = Table(title=title, title_justify="left")
    for column in rows[0] if rows else []:
        table.add_column(column, justify="left" if column == "algorithm" else "right")
    for row in rows:
        table.add_row(*(f"{v:.2f}" if isinstance(v, float) else str(v) for v in row.values()))
    return table
