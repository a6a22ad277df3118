import warnings
from pathlib import Path

import pytest
from conftest import road_graph
from typer.testing import CliRunner

import disland
import disland.disland
from disland.datasets.dimacs import dumps_dimacs
from disland.datasets.workload import load_workload
from disland.disland import app, main
from disland.routers import router_factory

runner = CliRunner()


@pytest.fixture(scope="module")
def graph():
    return road_graph(90, seed=21)


@pytest.fixture
def files(tmp_path, graph):
    gr, co = dumps_dimacs(graph)
    (tmp_path / "road.gr").write_bytes(gr)
    (tmp_path / "road.co").write_bytes(co)
    return tmp_path


@pytest.fixture
def indexed(files):
    result = runner.invoke(app, ["preprocess", str(files / "road.gr"), "-o", str(files / "i")])
    assert result.exit_code == 0, result.output
    return files


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert disland.__version__ in result.stdout


def test_preprocess_writes_an_index(indexed):
    assert (indexed / "i").stat().st_size > 0


def test_preprocess_without_accelerators(files):
    result = runner.invoke(
        app,
        ["preprocess", str(files / "road.gr"), "-o", str(files / "bare"), "--no-ch"]
        + ["--no-arcflags"],
    )
    assert result.exit_code == 0, result.output
    result = runner.invoke(app, ["query", str(files / "bare"), str(files / "road.gr"), "1", "90"])
    assert result.exit_code == 0, result.output


@pytest.mark.parametrize("algo", ["disland", "dijkstra", "agent_ch"])
def test_query_prints_the_distance(indexed, graph, algo):
    expected = router_factory("dijkstra", graph).distance(4, 77)
    result = runner.invoke(
        app, ["query", str(indexed / "i"), str(indexed / "road.gr"), "5", "78", "-a", algo]
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.strip().splitlines()[-1] == str(expected)


def test_query_rejects_unknown_nodes_and_algorithms(indexed):
    args = ["query", str(indexed / "i"), str(indexed / "road.gr")]
    assert runner.invoke(app, args + ["0", "3"]).exit_code == 2
    assert runner.invoke(app, args + ["1", "91"]).exit_code == 2
    assert runner.invoke(app, args + ["1", "2", "-a", "astar"]).exit_code != 0


def test_index_of_another_graph_is_refused(indexed):
    gr, _ = dumps_dimacs(road_graph(90, seed=22))
    (indexed / "other.gr").write_bytes(gr)
    result = runner.invoke(app, ["query", str(indexed / "i"), str(indexed / "other.gr"), "1", "2"])
    assert result.exit_code == 2


def test_malformed_graph_exits_with_two(files):
    (files / "bad.gr").write_text("p sp 3 2\na 1 2 x\n")
    result = runner.invoke(app, ["preprocess", str(files / "bad.gr"), "-o", str(files / "i")])
    assert result.exit_code == 2
    assert not (files / "i").exists()


def test_gen_queries_finds_the_coordinates(files):
    out = files / "road.queries"
    result = runner.invoke(app, ["gen-queries", str(files / "road.gr"), "-o", str(out), "-n", "3"])
    assert result.exit_code == 0, result.output
    workload = load_workload(out, 90)
    assert workload.per_set == 3
    assert all(len(pairs) <= 3 for pairs in workload.sets)


def test_gen_queries_needs_coordinates(tmp_path, graph):
    gr, _ = dumps_dimacs(graph)
    (tmp_path / "alone.gr").write_bytes(gr)
    result = runner.invoke(
        app, ["gen-queries", str(tmp_path / "alone.gr"), "-o", str(tmp_path / "q")]
    )
    assert result.exit_code == 2


def test_bench_with_and_without_index(indexed):
    gr, queries = str(indexed / "road.gr"), str(indexed / "q")
    assert runner.invoke(app, ["gen-queries", gr, "-o", queries, "-n", "4"]).exit_code == 0

    csv_file = indexed / "bench.csv"
    args = ["bench", gr, str(indexed / "i"), queries, "--algos", "dijkstra,disland"]
    result = runner.invoke(app, args + ["--csv", str(csv_file)])
    assert result.exit_code == 0, result.output
    header, *rows = csv_file.read_text().splitlines()
    assert header.startswith("algorithm,query_set")
    assert {row.split(",")[0] for row in rows} == {"dijkstra", "disland"}

    result = runner.invoke(app, ["bench", gr, queries, "--algos", "dijkstra,bidi,ch"])
    assert result.exit_code == 0, result.output


def test_bench_rejects_unknown_algorithms(indexed):
    gr, queries = str(indexed / "road.gr"), str(indexed / "q")
    assert runner.invoke(app, ["gen-queries", gr, "-o", queries, "-n", "2"]).exit_code == 0
    result = runner.invoke(app, ["bench", gr, queries, "--algos", "dijkstra,astar"])
    assert result.exit_code == 2


def test_stats_writes_one_csv_per_table(indexed):
    out = indexed / "stats"
    result = runner.invoke(
        app, ["stats", str(indexed / "road.gr"), str(indexed / "i"), "--csv-dir", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert sorted(p.stem for p in out.iterdir()) == sorted(
        ["agents", "bcc", "partition", "fragments", "supergraph", "space"]
    )


def test_main_exit_codes(files):
    with pytest.raises(SystemExit) as e:
        main(["query"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["preprocess", str(files / "road.gr"), "-o", str(files / "m")])
    assert e.value.code == 0
    with pytest.raises(SystemExit) as e:
        main(["bench", "--no-such-option"])
    assert e.value.code == 1


def test_cli_source_has_no_invalid_escapes():
    source = Path(disland.disland.__file__).read_text()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compile(source, disland.disland.__file__, "exec")


def test_default_bench_runs_on_an_index_without_ch(files):
    gr, queries, bare = str(files / "road.gr"), str(files / "q"), str(files / "bare")
    args = ["preprocess", gr, "-o", bare, "--no-ch"]
    assert runner.invoke(app, args).exit_code == 0
    assert runner.invoke(app, ["gen-queries", gr, "-o", queries, "-n", "2"]).exit_code == 0
    result = runner.invoke(app, ["bench", gr, bare, queries])
    assert result.exit_code == 0, result.output
    result = runner.invoke(app, ["query", bare, gr, "5", "78", "-a", "disland_ch"])
    assert result.exit_code == 0, result.output


def test_rank_filtered_flags(files, graph):
    gr, out = str(files / "road.gr"), str(files / "ranked")
    result = runner.invoke(app, ["preprocess", gr, "-o", out, "--rank-filtered-flags"])
    assert result.exit_code == 0, result.output
    expected = str(router_factory("dijkstra", graph).distance(4, 77))
    for algo in ["disland", "disland_ch"]:
        result = runner.invoke(app, ["query", out, gr, "5", "78", "-a", algo])
        assert result.exit_code == 0, result.output
        assert result.stdout.strip().splitlines()[-1] == expected
    args = ["preprocess", gr, "-o", out, "--rank-filtered-flags", "--no-ch"]
    assert runner.invoke(app, args).exit_code == 2
