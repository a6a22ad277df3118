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
"""Grid-stratified query workloads.

A 256x256 grid is laid over the bounding box of the node coordinates. Set Q_i holds node
pairs whose cells lie [2^(i-1), 2^i) cells apart, so Q_1 is the nearest band and Q_8 the
farthest.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, TextIO, Tuple

import numpy as np

from disland.errors import DimacsParseError, ValidationError
from disland.graph import WeightedGraph

logger = logging.getLogger(__name__)

GRID_SIZE = 256
SET_COUNT = 8
DEFAULT_PER_SET = 10_000
BUDGET_FACTOR = 1000


class GridMetric(str, Enum):
    chebyshev = "chebyshev"
    manhattan = "manhattan"
    euclidean = "euclidean"


@dataclass
class QueryWorkload:
    sets: List[List[Tuple[int, int]]]
    ell: float
    seed: int
    per_set: int
    metric: GridMetric = GridMetric.chebyshev
    grid: int = GRID_SIZE

    def __len__(self):
        return sum(len(pairs) for pairs in self.sets)

    @property
    def short_sets(self) -> List[int]:
        """1-based indices of the sets that hold fewer pairs than requested."""
        return [i + 1 for i, pairs in enumerate(self.sets) if len(pairs) < self.per_set]


def grid_cells(coordinates: np.ndarray, grid: int = GRID_SIZE) -> Tuple[np.ndarray, float]:
    """Cell (column, row) of every node and the side length of one square cell."""
    origin = coordinates.min(axis=0)
    extent = int((coordinates.max(axis=0) - origin).max())
    if extent == 0:
        return np.zeros_like(coordinates), 1.0
    cells = ((coordinates - origin) * grid) // extent
    return np.clip(cells, 0, grid - 1), extent / grid


def grid_distance(a: np.ndarray, b: np.ndarray, metric: GridMetric) -> np.ndarray:
    delta = np.abs(a - b)
    if metric == GridMetric.chebyshev:
        return delta.max(axis=-1).astype(np.float64)
    if metric == GridMetric.manhattan:
        return delta.sum(axis=-1).astype(np.float64)
    return np.sqrt((delta.astype(np.float64) ** 2).sum(axis=-1))


def band_of(distance: np.ndarray) -> np.ndarray:
    """Set index i with distance in [2^(i-1), 2^i), 0 for pairs inside one cell."""
    distance = np.asarray(distance, dtype=np.float64)
    band = np.zeros(distance.shape, dtype=np.int64)
    positive = distance >= 1
    band[positive] = np.floor(np.log2(distance[positive])).astype(np.int64) + 1
    return band


def gen_queries(
    g: WeightedGraph,
    per_set: int = DEFAULT_PER_SET,
    seed: int = 0,
    metric: GridMetric = GridMetric.chebyshev,
    budget_factor: int = BUDGET_FACTOR,
) -> QueryWorkload:
    if g.coordinates is None:
        raise ValidationError("query generation needs node coordinates (.co file)")
    if per_set < 0:
        raise ValidationError(f"per-set count must be non-negative, got {per_set}")
    metric = GridMetric(metric)
    rng = np.random.default_rng(seed)
    sets: List[List[Tuple[int, int]]] = [[] for _ in range(SET_COUNT)]
    if g.node_count < 2 or per_set == 0:
        return QueryWorkload(sets, 1.0, seed, per_set, metric)

    cells, ell = grid_cells(g.coordinates)
    for i in range(1, SET_COUNT + 1):
        budget = budget_factor * per_set
        pairs = sets[i - 1]
        while len(pairs) < per_set and budget > 0:
            batch = min(budget, max(4 * (per_set - len(pairs)), 1024))
            budget -= batch
            s = rng.integers(0, g.node_count, size=batch)
            t = rng.integers(0, g.node_count, size=batch)
            hits = np.flatnonzero(band_of(grid_distance(cells[s], cells[t], metric)) == i)
            for j in hits[: per_set - len(pairs)]:
                pairs.append((int(s[j]), int(t[j])))
        if len(pairs) < per_set:
            logger.warning(f"Q{i}: only {len(pairs)} of {per_set} pairs within the sampling budget")
    return QueryWorkload(sets, ell, seed, per_set, metric)


def write_workload(w: QueryWorkload, stream: TextIO):
    stream.write("# disland query workload\n")
    stream.write(f"# seed {w.seed}\n")
    stream.write(f"# ell {w.ell!r}\n")
    stream.write(f"# grid {w.grid} {w.grid}\n")
    stream.write(f"# metric {w.metric.value}\n")
    stream.write(f"# per-set {w.per_set}\n")
    for i, pairs in enumerate(w.sets, start=1):
        for s, t in pairs:
            stream.write(f"{i} {s + 1} {t + 1}\n")


def read_workload(stream: TextIO, node_count: Optional[int] = None) -> QueryWorkload:
    header = {}
    sets: List[List[Tuple[int, int]]] = [[] for _ in range(SET_COUNT)]
    for line_number, line in enumerate(stream, start=1):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "#":
            if len(tokens) >= 3:
                header[tokens[1]] = tokens[2:]
            continue
        try:
            i, s, t = (int(token) for token in tokens)
        except ValueError:
            raise DimacsParseError("query line must read '<set> <s> <t>'", line_number)
        if not 1 <= i <= SET_COUNT:
            raise ValidationError(f"line {line_number}: query set {i} outside [1, {SET_COUNT}]")
        for node in (s, t):
            if node < 1 or (node_count is not None and node > node_count):
                raise ValidationError(f"line {line_number}: node {node} outside the graph")
        sets[i - 1].append((s - 1, t - 1))
    per_set = int(header["per-set"][0]) if "per-set" in header else max(map(len, sets))
    return QueryWorkload(
        sets=sets,
        ell=float(header["ell"][0]) if "ell" in header else math.nan,
        seed=int(header["seed"][0]) if "seed" in header else 0,
        per_set=per_set,
        metric=GridMetric(header["metric"][0]) if "metric" in header else GridMetric.chebyshev,
        grid=int(header["grid"][0]) if "grid" in header else GRID_SIZE,
    )


def save_workload(w: QueryWorkload, path: Path):
    with open(path, "w") as f:
        write_workload(w, f)


def load_workload(path: Path, node_count: Optional[int] = None) -> QueryWorkload:
    with open(path) as f:
        return read_workload(f, node_count)
