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
"""Readers and writers for the 9th DIMACS Implementation Challenge formats.

A `.gr` file holds one `p sp <n> <m>` problem line followed by `a <u> <v> <w>` arcs with
1-based node ids; a `.co` file holds `v <id> <x> <y>` coordinate lines. Lines starting
with `c` are comments. Both files may be gzip-compressed.
"""
import gzip
import io
import logging
from typing import BinaryIO, Dict, Optional, TextIO, Tuple, Union

import numpy as np

from disland.errors import DimacsParseError, ValidationError
from disland.graph import WeightedGraph

logger = logging.getLogger(__name__)

GZIP_MAGIC = b"\x1f\x8b"

Source = Union[bytes, bytearray, BinaryIO]


def _read_lines(source: Source):
    data = bytes(source) if isinstance(source, (bytes, bytearray)) else source.read()
    if data[:2] == GZIP_MAGIC:
        data = gzip.decompress(data)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise DimacsParseError(f"input is not ASCII text ({e})") from e
    return enumerate(text.splitlines(), start=1)


def _parse_ints(tokens, line_number: int):
    try:
        return [int(token) for token in tokens]
    except ValueError:
        raise DimacsParseError(f"expected integers, got {' '.join(tokens)!r}", line_number)


def _parse_gr(source: Source) -> Tuple[int, Dict[Tuple[int, int], int]]:
    node_count = None
    arcs: Dict[Tuple[int, int], int] = {}
    for line_number, line in _read_lines(source):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if node_count is not None:
                raise DimacsParseError("duplicate problem line", line_number)
            if len(tokens) != 4 or tokens[1] != "sp":
                raise DimacsParseError("problem line must read 'p sp <n> <m>'", line_number)
            node_count, _ = _parse_ints(tokens[2:], line_number)
            if node_count < 0:
                raise ValidationError(f"line {line_number}: negative node count {node_count}")
        elif tokens[0] == "a":
            if node_count is None:
                raise DimacsParseError("arc before problem line", line_number)
            if len(tokens) != 4:
                raise DimacsParseError("arc line must read 'a <u> <v> <w>'", line_number)
            u, v, w = _parse_ints(tokens[1:], line_number)
            for node in (u, v):
                if not 1 <= node <= node_count:
                    raise ValidationError(
                        f"line {line_number}: node {node} outside [1, {node_count}]"
                    )
            if w <= 0:
                raise ValidationError(f"line {line_number}: non-positive weight {w}")
            if u == v:
                logger.debug(f"line {line_number}: dropping self-loop on node {u}")
                continue
            key = (u - 1, v - 1) if u < v else (v - 1, u - 1)
            if w < arcs.get(key, w + 1):
                arcs[key] = w
        else:
            raise DimacsParseError(f"unknown line type {tokens[0]!r}", line_number)
    if node_count is None:
        raise DimacsParseError("missing problem line 'p sp <n> <m>'")
    return node_count, arcs


def _parse_co(source: Source, node_count: int) -> np.ndarray:
    coordinates = np.zeros((node_count, 2), dtype=np.int64)
    seen = np.zeros(node_count, dtype=bool)
    for line_number, line in _read_lines(source):
        tokens = line.split()
        if not tokens or tokens[0] in ("c", "p"):
            continue
        if tokens[0] != "v" or len(tokens) != 4:
            raise DimacsParseError("coordinate line must read 'v <id> <x> <y>'", line_number)
        node, x, y = _parse_ints(tokens[1:], line_number)
        if not 1 <= node <= node_count:
            raise ValidationError(f"line {line_number}: node {node} outside [1, {node_count}]")
        coordinates[node - 1] = (x, y)
        seen[node - 1] = True
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0]) + 1
        count = int((~seen).sum())
        raise ValidationError(f"coordinates missing for {count} nodes (first: {missing})")
    return coordinates


def load_dimacs(gr_source: Source, co_source: Optional[Source] = None) -> WeightedGraph:
    node_count, arcs = _parse_gr(gr_source)
    coordinates = None if co_source is None else _parse_co(co_source, node_count)
    g = WeightedGraph(node_count, ((u, v, w) for (u, v), w in arcs.items()), coordinates)
    logger.info(f"Loaded DIMACS graph with {g.node_count} nodes and {g.edge_count} edges")
    return g


def write_dimacs(g: WeightedGraph, gr_stream: TextIO, co_stream: Optional[TextIO] = None):
    """Write both arc directions of every edge, as the DIMACS road files do."""
    gr_stream.write(f"p sp {g.node_count} {2 * g.edge_count}\n")
    for u, v, w in g.edges():
        gr_stream.write(f"a {u + 1} {v + 1} {w}\n")
        gr_stream.write(f"a {v + 1} {u + 1} {w}\n")
    if co_stream is not None:
        if g.coordinates is None:
            raise ValidationError("graph has no coordinates to write")
        co_stream.write(f"p aux sp co {g.node_count}\n")
        for i, (x, y) in enumerate(g.coordinates):
            co_stream.write(f"v {i + 1} {x} {y}\n")


def load_dimacs_files(gr_file, co_file=None) -> WeightedGraph:
    with open(gr_file, "rb") as gr:
        if co_file is None:
            return load_dimacs(gr)
        with open(co_file, "rb") as co:
            return load_dimacs(gr, co)


def dumps_dimacs(g: WeightedGraph) -> Tuple[bytes, Optional[bytes]]:
    gr, co = io.StringIO(), io.StringIO() if g.coordinates is not None else None
    write_dimacs(g, gr, co)
    return gr.getvalue().encode("ascii"), None if co is None else co.getvalue().encode("ascii")
