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
import importlib
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from disland.bench import bench as run_bench
from disland.bench import render_table, selected_algorithms, write_csv, write_tables
from disland.bench import stats as index_stats
from disland.datasets import find_coordinates_file, supported_file_extensions
from disland.datasets.dimacs import load_dimacs_files
from disland.datasets.workload import DEFAULT_PER_SET, GridMetric, load_workload, save_workload
from disland.datasets.workload import gen_queries as generate_workload
from disland.errors import DislandError, ExactnessError, ValidationError
from disland.graph import UNREACHABLE
from disland.oracle import DislandConfig, extra_space
from disland.oracle import preprocess as build_index
from disland.routers import available_routers, index_routers, router_factory
from disland.serialization import load_index_file, save_index_file

logger = logging.getLogger(__name__)
console = Console()


def version_callback(value: bool):
    if value:
        import disland

        print(f"DisLand Version: {disland.__version__}")
        raise typer.Exit(0)


def algo_callback(value: str):
    if not value:
        return value
    routers = available_routers()
    if value not in routers:
        raise typer.BadParameter(f"Supported algorithms are:\n{', '.join(sorted(routers))}")
    return value


@contextmanager
def exit_on_error():
    try:
        yield
    except ExactnessError as e:
        logger.error(str(e))
        raise typer.Exit(3)
    except DislandError as e:
        logger.error(str(e))
        raise typer.Exit(2)


docstring = f"""
:world_map: DisLand, exact shortest distances on road networks :world_map:\n
\b
[bold green]Examples: [/bold green]
# Build an index for a DIMACS road graph \\[{", ".join(supported_file_extensions())}]
$ disland preprocess USA-road-d.NY.gr -o NY.dlnd

# Ask for one distance (node ids are 1-based, as in the .gr file)
$ disland query NY.dlnd USA-road-d.NY.gr 1 4242

# Generate the Q1..Q8 workload from the coordinates and benchmark every algorithm
$ disland gen-queries USA-road-d.NY.gr USA-road-d.NY.co -o NY.queries
$ disland bench USA-road-d.NY.gr NY.dlnd NY.queries --csv NY.bench.csv
"""
app = typer.Typer(add_completion=False, rich_markup_mode="rich", help=docstring)


@app.callback()
def setup(
    verbose: bool = typer.Option(
        False,
        "--verbose",
        "-v",
        help="[Optional] Log debug messages",
        rich_help_panel="Additional Options",
    ),
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        help="Show the current version of disland",
        callback=version_callback,
        is_eager=True,
    ),
):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@app.command(help="Build the DisLand index of a DIMACS graph")
def preprocess(
    gr: Path = typer.Argument(..., exists=True, dir_okay=False, help="DIMACS .gr file"),
    co: Optional[Path] = typer.Argument(
        None, exists=True, dir_okay=False, show_default=False, help="[Optional] DIMACS .co file"
    ),
    output: Path = typer.Option(..., "--output", "-o", help="Where to write the index"),
    c: int = typer.Option(
        DislandConfig.c,
        "--c",
        help="Agent constant: DRA branches hold at most c*floor(sqrt(|V|)) nodes",
        rich_help_panel="Index Options",
    ),
    epsilon: float = typer.Option(
        DislandConfig.epsilon,
        "--epsilon",
        help="Warn when boundary nodes exceed this share of the shrink graph",
        rich_help_panel="Index Options",
    ),
    fragments: Optional[int] = typer.Option(
        None,
        "--fragments",
        "-k",
        show_default=False,
        help="[Optional] Fragment count, default ceil(|V|/gamma), rounded up to tens from 10 on",
        rich_help_panel="Index Options",
    ),
    ch: bool = typer.Option(
        DislandConfig.use_ch,
        "--ch/--no-ch",
        help="Build a contraction hierarchy over the shrink graph",
        rich_help_panel="Index Options",
    ),
    arcflags: bool = typer.Option(
        DislandConfig.use_arcflags,
        "--arcflags/--no-arcflags",
        help="Build arc flags over the super graph",
        rich_help_panel="Index Options",
    ),
    rank_filtered_flags: bool = typer.Option(
        DislandConfig.rank_filtered_flags,
        "--rank-filtered-flags",
        help="[Optional] Flag order rising or turning paths only; serves CH-restricted queries",
        rich_help_panel="Index Options",
    ),
    progress: bool = typer.Option(
        False,
        "--progress",
        "-p",
        help="[Optional] Show progress bars",
        rich_help_panel="Additional Options",
    ),
):
    with exit_on_error():
        g = load_dimacs_files(gr, co)
        cfg = DislandConfig(
            c=c,
            epsilon=epsilon,
            use_ch=ch,
            use_arcflags=arcflags,
            k_hint=fragments,
            rank_filtered_flags=rank_filtered_flags,
        )
        idx = build_index(g, cfg, progress)
        save_index_file(idx, output)
        space = extra_space(idx)
        console.print(
            f"Wrote {output}: {len(idx.dra.agents)} agents, {idx.partition.k} fragments, "
            f"super graph {idx.supergraph.node_count} nodes / {idx.supergraph.edge_count} "
            f"edges, extra space {space.ratio:.3f}x of the graph"
        )


@app.command(help="Exact distance between two nodes (1-based ids)")
def query(
    index: Path = typer.Argument(..., exists=True, dir_okay=False, help="Index file"),
    gr: Path = typer.Argument(..., exists=True, dir_okay=False, help="DIMACS .gr file"),
    s: int = typer.Argument(..., help="Source node"),
    t: int = typer.Argument(..., help="Target node"),
    algo: str = typer.Option(
        "disland",
        "--algo",
        "-a",
        case_sensitive=False,
        autocompletion=available_routers,
        callback=algo_callback,
        help="Algorithm answering the query",
    ),
):
    with exit_on_error():
        g = load_dimacs_files(gr)
        for x in (s, t):
            if not 1 <= x <= g.node_count:
                raise ValidationError(f"node {x} outside [1, {g.node_count}]")
        idx = load_index_file(index, g) if algo in index_routers() else None
        d = router_factory(algo, g, index=idx).distance(s - 1, t - 1)
        print("unreachable" if d == UNREACHABLE else d)


@app.command("gen-queries", help="Generate the grid-banded query sets Q1..Q8")
def gen_queries(
    gr: Path = typer.Argument(..., exists=True, dir_okay=False, help="DIMACS .gr file"),
    co: Optional[Path] = typer.Argument(
        None,
        exists=True,
        dir_okay=False,
        show_default=False,
        help="[Optional] DIMACS .co file, default the .co next to the .gr",
    ),
    output: Path = typer.Option(..., "--output", "-o", help="Where to write the workload"),
    per_set: int = typer.Option(
        DEFAULT_PER_SET,
        "--per-set",
        "-n",
        help="Pairs per query set",
        rich_help_panel="Workload Options",
    ),
    seed: int = typer.Option(0, "--seed", help="RNG seed", rich_help_panel="Workload Options"),
    metric: GridMetric = typer.Option(
        GridMetric.chebyshev,
        "--metric",
        case_sensitive=False,
        help="Distance between grid cells",
        rich_help_panel="Workload Options",
    ),
):
    with exit_on_error():
        co = co or find_coordinates_file(gr)
        if co is None:
            raise ValidationError(f"no coordinates given and no .co file found next to {gr}")
        g = load_dimacs_files(gr, co)
        workload = generate_workload(g, per_set=per_set, seed=seed, metric=metric)
        save_workload(workload, output)
        sizes = ", ".join(f"Q{i}={len(p)}" for i, p in enumerate(workload.sets, start=1))
        console.print(f"Wrote {output} ({metric.value}): {sizes}")


@app.command(help="Benchmark algorithms on a workload and cross-check their answers")
def bench(
    gr: Path = typer.Argument(..., exists=True, dir_okay=False, help="DIMACS .gr file"),
    files: List[Path] = typer.Argument(
        ..., exists=True, dir_okay=False, help=r"\[INDEX] WORKLOAD", show_default=False
    ),
    algos: Optional[str] = typer.Option(
        None,
        "--algos",
        show_default=False,
        help="[Optional] Comma-separated algorithms, default all",
        rich_help_panel="Benchmark Options",
    ),
    csv_file: Optional[Path] = typer.Option(
        None,
        "--csv",
        show_default=False,
        help="[Optional] Write the report as CSV",
        rich_help_panel="Benchmark Options",
    ),
    progress: bool = typer.Option(
        False,
        "--progress",
        "-p",
        help="[Optional] Show progress bars",
        rich_help_panel="Additional Options",
    ),
):
    if len(files) > 2:
        raise typer.BadParameter("expected [INDEX] WORKLOAD")
    index, workload_file = (None, files[0]) if len(files) == 1 else files
    with exit_on_error():
        g = load_dimacs_files(gr)
        selection = selected_algorithms(algos.split(",") if algos else None)
        idx = load_index_file(index, g) if index else None
        workload = load_workload(workload_file, g.node_count)
        report = run_bench(g, idx, workload, selection, progress)
        rows = report.as_rows()
        if csv_file:
            with open(csv_file, "w", newline="") as f:
                write_csv(rows, f)
        if rows:
            console.print(render_table(f"Benchmark ({report.metric})", rows))


@app.command(help="Statistics of an index, one table per structure")
def stats(
    gr: Path = typer.Argument(..., exists=True, dir_okay=False, help="DIMACS .gr file"),
    index: Path = typer.Argument(..., exists=True, dir_okay=False, help="Index file"),
    csv_dir: Optional[Path] = typer.Option(
        None,
        "--csv-dir",
        file_okay=False,
        show_default=False,
        help="[Optional] Write one CSV per table into this directory",
    ),
):
    with exit_on_error():
        g = load_dimacs_files(gr)
        tables = index_stats(g, load_index_file(index, g))
        if csv_dir:
            write_tables(tables, csv_dir)
        for name, rows in tables.items():
            console.print(render_table(name, rows))


# Exceptions of the click build typer runs on, vendored or not
_click_errors = importlib.import_module(typer.Exit.__module__)


def main(args: Optional[List[str]] = None):
    try:
        code = app(args=args, standalone_mode=False)
    except _click_errors.UsageError as e:
        e.show()
        code = 1
    except typer.Abort:
        code = 1
    sys.exit(code or 0)
