import io
import struct
import zlib

import pytest
from conftest import random_pairs, road_graph

from disland.errors import IndexFormatError
from disland.oracle import DislandConfig, preprocess, query
from disland.serialization import (
    FORMAT_VERSION,
    MAGIC,
    dumps_index,
    load_index_file,
    loads_index,
    save_index_file,
)


@pytest.fixture(scope="module")
def graph():
    return road_graph(150, seed=8)


@pytest.fixture(scope="module")
def index(graph):
    return preprocess(graph)


def test_header(index):
    data = dumps_index(index)
    assert data[:4] == MAGIC
    assert struct.unpack("<H", data[4:6])[0] == FORMAT_VERSION


def test_round_trip_answers_the_same(graph, index):
    loaded = loads_index(dumps_index(index), graph)
    assert loaded.dra == index.dra
    assert loaded.partition == index.partition
    assert loaded.supergraph.edges == index.supergraph.edges
    assert loaded.supergraph.fragment_landmarks == index.supergraph.fragment_landmarks
    assert loaded.ch.rank == index.ch.rank and loaded.ch.shortcuts == index.ch.shortcuts
    assert loaded.arcflags == index.arcflags
    assert loaded.fragment_region == index.fragment_region
    assert loaded.config == index.config
    for s, t in random_pairs(graph.node_count, 200, seed=3):
        assert query(loaded, graph, s, t) == query(index, graph, s, t)


def test_optional_sections_may_be_absent(graph):
    idx = preprocess(graph, DislandConfig(use_ch=False, use_arcflags=False, k_hint=7))
    loaded = loads_index(dumps_index(idx), graph)
    assert loaded.ch is None and loaded.arcflags is None
    assert loaded.config == idx.config
    assert query(loaded, graph, 0, 149) == query(idx, graph, 0, 149)


def test_rank_filtered_flags_survive_a_round_trip(graph):
    idx = preprocess(graph, DislandConfig(rank_filtered_flags=True))
    loaded = loads_index(dumps_index(idx), graph)
    assert loaded.arcflags.rank_filtered
    assert loaded.config == idx.config and loaded.config.rank_filtered_flags
    for s, t in random_pairs(graph.node_count, 100, seed=4):
        assert query(loaded, graph, s, t, use_ch=True) == query(idx, graph, s, t, use_ch=True)


def test_preprocessing_is_byte_identical(graph, index):
    assert dumps_index(preprocess(graph)) == dumps_index(index)


def test_file_round_trip(tmp_path, graph, index):
    save_index_file(index, tmp_path / "g.dlnd")
    assert load_index_file(tmp_path / "g.dlnd", graph).dra == index.dra


def test_other_graph_is_rejected(index):
    with pytest.raises(IndexFormatError):
        loads_index(dumps_index(index), road_graph(150, seed=9))


def test_bad_magic_and_version(graph, index):
    data = dumps_index(index)
    with pytest.raises(IndexFormatError):
        loads_index(b"XXXX" + data[4:], graph)
    with pytest.raises(IndexFormatError):
        loads_index(data[:4] + struct.pack("<H", FORMAT_VERSION + 1) + data[6:], graph)


def test_corruption_is_detected(graph, index):
    data = bytearray(dumps_index(index))
    data[40] ^= 0xFF
    with pytest.raises(IndexFormatError):
        loads_index(bytes(data), graph)


def test_truncation_is_detected(graph, index):
    data = dumps_index(index)
    with pytest.raises(IndexFormatError):
        loads_index(data[:-3], graph)


def test_unknown_sections_are_skipped(graph, index):
    payload = b"from a newer writer"
    extra = b"NOTE" + struct.pack("<Q", len(payload)) + payload
    extra += struct.pack("<I", zlib.crc32(payload))
    loaded = loads_index(dumps_index(index) + extra, graph)
    assert loaded.dra == index.dra


def test_missing_required_section(graph, index):
    header = dumps_index(index)[:6]
    with pytest.raises(IndexFormatError):
        loads_index(header, graph)


def test_stream_api(graph, index):
    from disland.serialization import load_index, save_index

    buffer = io.BytesIO()
    save_index(index, buffer)
    buffer.seek(0)
    assert load_index(buffer, graph).partition == index.partition
