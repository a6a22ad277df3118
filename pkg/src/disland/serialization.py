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
"""Binary index format.

    magic "DLND" | u16 version | section*

Every section is a 4-byte tag, a u64 payload length, the payload and a u32 CRC32 of the
payload. Payloads are sequences of u64-counted little-endian int64 arrays, float64 arrays
and byte blobs. Unknown tags are skipped. All integers are little-endian.
"""
import io
import logging
import struct
import zlib
from pathlib import Path
from typing import BinaryIO, Dict, List, Optional, Tuple

import numpy as np

from disland.agents import DraAssignment, ShrinkGraph
from disland.errors import IndexFormatError
from disland.graph import WeightedGraph, graph_checksum
from disland.oracle import DislandConfig, PreprocessedIndex
from disland.partition import Partition
from disland.speedups import ArcFlagIndex, ChIndex
from disland.supergraph import EdgeKind, SuperEdge, SuperGraph

logger = logging.getLogger(__name__)

MAGIC = b"DLND"
FORMAT_VERSION = 2

META, DRA, SHRINK, PARTITION, SUPER, CH, ARCFLAG = (
    b"META",
    b"DRA\0",
    b"SHRK",
    b"PART",
    b"SUPR",
    b"CHIX",
    b"ARCF",
)
REQUIRED = (META, DRA, SHRINK, PARTITION, SUPER)

_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


class _PayloadWriter:
    def __init__(self):
        self.buffer = io.BytesIO()

    def blob(self, data: bytes):
        self.buffer.write(_U64.pack(len(data)))
        self.buffer.write(data)

    def ints(self, values):
        values = np.asarray(list(values), dtype="<i8")
        self.buffer.write(_U64.pack(len(values)))
        self.buffer.write(values.tobytes())

    def floats(self, values):
        values = np.asarray(list(values), dtype="<f8")
        self.buffer.write(_U64.pack(len(values)))
        self.buffer.write(values.tobytes())

    def getvalue(self) -> bytes:
        return self.buffer.getvalue()


class _PayloadReader:
    def __init__(self, tag: bytes, data: bytes):
        self.tag = tag
        self.data = data
        self.offset = 0

    def _take(self, size: int) -> int:
        start = self.offset
        if start + size > len(self.data):
            raise IndexFormatError(f"section {self.tag!r} is truncated")
        self.offset += size
        return start

    def _count(self) -> int:
        return _U64.unpack_from(self.data, self._take(_U64.size))[0]

    def blob(self) -> bytes:
        size = self._count()
        start = self._take(size)
        return self.data[start : start + size]

    def ints(self) -> List[int]:
        count = self._count()
        start = self._take(8 * count)
        if count == 0:
            return []
        return np.frombuffer(self.data, dtype="<i8", count=count, offset=start).tolist()

    def floats(self) -> List[float]:
        count = self._count()
        start = self._take(8 * count)
        if count == 0:
            return []
        return np.frombuffer(self.data, dtype="<f8", count=count, offset=start).tolist()


def _chunks(values: List[int], sizes: List[int]) -> List[List[int]]:
    out, start = [], 0
    for size in sizes:
        out.append(values[start : start + size])
        start += size
    return out


def _write_meta(w: _PayloadWriter, idx: PreprocessedIndex):
    cfg = idx.config
    w.ints(
        [
            idx.node_count,
            idx.edge_count,
            cfg.c,
            int(cfg.use_ch),
            int(cfg.use_arcflags),
            cfg.k_hint or 0,
        ]
    )
    w.floats([cfg.epsilon])
    w.blob(bytes.fromhex(idx.checksum))


def _write_dra(w: _PayloadWriter, dra: DraAssignment):
    agents = dra.agents
    w.ints([dra.threshold])
    w.ints(agents)
    w.ints(len(dra.branches[u]) for u in agents)
    w.ints(len(branch) for u in agents for branch in dra.branches[u])
    w.ints(x for u in agents for branch in dra.branches[u] for x in branch)
    w.ints(len(dra.agent_dist[u]) for u in agents)
    w.ints(x for u in agents for x in sorted(dra.agent_dist[u]))
    w.ints(dra.agent_dist[u][x] for u in agents for x in sorted(dra.agent_dist[u]))


def _read_dra(r: _PayloadReader, node_count: int) -> DraAssignment:
    (threshold,) = r.ints()
    agents = r.ints()
    branch_counts = r.ints()
    branch_sizes = r.ints()
    members = _chunks(r.ints(), branch_sizes)
    dist_sizes = r.ints()
    dist_nodes = _chunks(r.ints(), dist_sizes)
    dist_values = _chunks(r.ints(), dist_sizes)

    owner = list(range(node_count))
    branch_of = [-1] * node_count
    branches: Dict[int, List[Tuple[int, ...]]] = {}
    agent_dist: Dict[int, Dict[int, int]] = {}
    grouped = _chunks(list(range(len(members))), branch_counts)
    for u, ids, nodes, values in zip(agents, grouped, dist_nodes, dist_values):
        branches[u] = [tuple(members[b]) for b in ids]
        for i, branch in enumerate(branches[u]):
            for x in branch:
                owner[x] = u
                branch_of[x] = i
        agent_dist[u] = dict(zip(nodes, values))
    return DraAssignment(owner, branch_of, branches, agent_dist, threshold)


def _write_super(w: _PayloadWriter, sg: SuperGraph):
    w.ints(sg.nodes)
    edges = sorted(sg.edges.items())
    w.ints(x for (u, v), e in edges for x in (u, v, e.weight, int(e.kind), e.fragment))
    w.ints(len(landmarks) for landmarks in sg.fragment_landmarks)
    w.ints(x for landmarks in sg.fragment_landmarks for x in landmarks)
    w.ints(sg.fragment_enforced)


def _read_super(r: _PayloadReader) -> SuperGraph:
    nodes = r.ints()
    flat = r.ints()
    edges = {
        (flat[i], flat[i + 1]): SuperEdge(flat[i + 2], EdgeKind(flat[i + 3]), flat[i + 4])
        for i in range(0, len(flat), 5)
    }
    sizes = r.ints()
    landmarks = _chunks(r.ints(), sizes)
    return SuperGraph(nodes, edges, landmarks, r.ints())


def _write_shrink(w: _PayloadWriter, shrink: ShrinkGraph):
    w.ints(shrink.nodes)


def _write_partition(w: _PayloadWriter, p: Partition):
    w.ints([p.gamma])
    w.ints(p.fragment_of)


def _write_ch(w: _PayloadWriter, ch: ChIndex):
    w.ints(ch.rank)
    w.ints(x for key, value in sorted(ch.shortcuts.items()) for x in (*key, *value))


def _write_arcflags(w: _PayloadWriter, idx: ArcFlagIndex, fragment_region: List[int]):
    width = max(1, -(-idx.k // 8))
    keys = sorted(idx.flags)
    w.ints([idx.k, int(idx.rank_filtered)])
    w.ints(idx.region_of)
    w.ints(fragment_region)
    w.ints(x for key in keys for x in key)
    w.blob(b"".join(idx.flags[key].to_bytes(width, "little") for key in keys))


def _read_arcflags(r: _PayloadReader) -> Tuple[ArcFlagIndex, List[int]]:
    k, rank_filtered = r.ints()
    region_of = r.ints()
    fragment_region = r.ints()
    flat = r.ints()
    masks = r.blob()
    width = max(1, -(-k // 8))
    keys = [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]
    if len(masks) != width * len(keys):
        raise IndexFormatError("arc-flag masks do not match the edge list")
    flags = {
        key: int.from_bytes(masks[i * width : (i + 1) * width], "little")
        for i, key in enumerate(keys)
    }
    return ArcFlagIndex(region_of, k, flags, bool(rank_filtered)), fragment_region


def _sections(idx: PreprocessedIndex):
    sections = []

    def section(tag, write, *args):
        w = _PayloadWriter()
        write(w, *args)
        sections.append((tag, w.getvalue()))

    section(META, _write_meta, idx)
    section(DRA, _write_dra, idx.dra)
    section(SHRINK, _write_shrink, idx.shrink)
    section(PARTITION, _write_partition, idx.partition)
    section(SUPER, _write_super, idx.supergraph)
    if idx.ch is not None:
        section(CH, _write_ch, idx.ch)
    if idx.arcflags is not None:
        section(ARCFLAG, _write_arcflags, idx.arcflags, idx.fragment_region)
    return sections


def save_index(idx: PreprocessedIndex, stream: BinaryIO):
    stream.write(MAGIC)
    stream.write(_U16.pack(FORMAT_VERSION))
    for tag, payload in _sections(idx):
        stream.write(tag)
        stream.write(_U64.pack(len(payload)))
        stream.write(payload)
        stream.write(_U32.pack(zlib.crc32(payload)))


def dumps_index(idx: PreprocessedIndex) -> bytes:
    buffer = io.BytesIO()
    save_index(idx, buffer)
    return buffer.getvalue()


def _read_exact(stream: BinaryIO, size: int, what: str) -> bytes:
    data = stream.read(size)
    if len(data) != size:
        raise IndexFormatError(f"unexpected end of index while reading {what}")
    return data


def _read_sections(stream: BinaryIO) -> Dict[bytes, bytes]:
    if stream.read(len(MAGIC)) != MAGIC:
        raise IndexFormatError("not a disland index (bad magic)")
    (version,) = _U16.unpack(_read_exact(stream, _U16.size, "version"))
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported index version {version}, expected {FORMAT_VERSION}")
    sections: Dict[bytes, bytes] = {}
    while True:
        tag = stream.read(4)
        if not tag:
            return sections
        if len(tag) != 4:
            raise IndexFormatError("truncated section tag")
        (length,) = _U64.unpack(_read_exact(stream, _U64.size, f"{tag!r} length"))
        payload = _read_exact(stream, length, f"{tag!r} payload")
        (crc,) = _U32.unpack(_read_exact(stream, _U32.size, f"{tag!r} checksum"))
        if zlib.crc32(payload) != crc:
            raise IndexFormatError(f"checksum mismatch in section {tag!r}")
        if tag not in (META, DRA, SHRINK, PARTITION, SUPER, CH, ARCFLAG):
            logger.debug(f"Skipping unknown index section {tag!r}")
            continue
        sections[tag] = payload


def load_index(stream: BinaryIO, g: WeightedGraph) -> PreprocessedIndex:
    """Read an index and bind it to `g`, the graph it was built from."""
    sections = _read_sections(stream)
    for tag in REQUIRED:
        if tag not in sections:
            raise IndexFormatError(f"index lacks required section {tag!r}")

    meta = _PayloadReader(META, sections[META])
    node_count, edge_count, c, use_ch, use_arcflags, k_hint = meta.ints()
    (epsilon,) = meta.floats()
    checksum = meta.blob().hex()
    if checksum != graph_checksum(g):
        raise IndexFormatError("index was built for a different graph (checksum mismatch)")

    dra = _read_dra(_PayloadReader(DRA, sections[DRA]), node_count)
    shrink_graph, shrink_nodes = g.subgraph(_PayloadReader(SHRINK, sections[SHRINK]).ints())
    shrink = ShrinkGraph(shrink_graph, shrink_nodes)
    part = _PayloadReader(PARTITION, sections[PARTITION])
    (gamma,) = part.ints()
    partition = Partition.from_assignment(shrink_graph, part.ints(), gamma)
    supergraph = _read_super(_PayloadReader(SUPER, sections[SUPER]))

    ch: Optional[ChIndex] = None
    if CH in sections:
        r = _PayloadReader(CH, sections[CH])
        rank, flat = r.ints(), r.ints()
        shortcuts = {
            (flat[i], flat[i + 1]): (flat[i + 2], flat[i + 3]) for i in range(0, len(flat), 4)
        }
        ch = ChIndex(shrink_graph, rank, shortcuts)
    arcflags, fragment_region = None, []
    if ARCFLAG in sections:
        arcflags, fragment_region = _read_arcflags(_PayloadReader(ARCFLAG, sections[ARCFLAG]))
    rank_filtered = arcflags is not None and arcflags.rank_filtered
    if rank_filtered and ch is None:
        raise IndexFormatError("rank-filtered arc flags need the contraction hierarchy section")

    config = DislandConfig(
        c=c,
        epsilon=epsilon,
        use_ch=bool(use_ch) and ch is not None,
        use_arcflags=bool(use_arcflags) and arcflags is not None,
        k_hint=k_hint or None,
        rank_filtered_flags=rank_filtered,
    )
    return PreprocessedIndex(
        config=config,
        node_count=node_count,
        edge_count=edge_count,
        checksum=checksum,
        dra=dra,
        shrink=shrink,
        partition=partition,
        supergraph=supergraph,
        ch=ch,
        arcflags=arcflags,
        fragment_region=fragment_region,
    )


def loads_index(data: bytes, g: WeightedGraph) -> PreprocessedIndex:
    return load_index(io.BytesIO(data), g)


def save_index_file(idx: PreprocessedIndex, path: Path):
    with open(path, "wb") as f:
        save_index(idx, f)


def load_index_file(path: Path, g: WeightedGraph) -> PreprocessedIndex:
    with open(path, "rb") as f:
        return load_index(f, g)
