"""Command-line front end: ``tilemars <command> --spec FILE ...``."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import benchmarks, lattice, oracle
from .algorithms import flow_in, flow_out, mars_partition, restrict_to_tile
from .errors import MarsError, OracleMismatch
from .model import ProblemSpec, format_signature, validate
from .qset import form_text
from .render import render_points3d, render_svg2d
from .report import analyze, check_against_oracle, format_report, format_table
from .specfile import load_spec


def _parse_ints(text: str | None, what: str) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers, got {text!r}")


def _load(spec_arg: str, tile_sizes: str | None) -> ProblemSpec:
    path = Path(spec_arg)
    if path.exists():
        spec = load_spec(path)
    elif spec_arg in benchmarks.ALL:
        spec = benchmarks.load(spec_arg)
    else:
        raise FileNotFoundError(f"no such spec file or bundled benchmark: {spec_arg}")
    sizes = _parse_ints(tile_sizes, "--tile-sizes")
    if sizes:
        spec = spec.with_tile_sizes(sizes)
    return spec


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _dump(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def common_options(f):
    @click.option("--spec", "spec_arg", help="Problem file (JSON) or bundled benchmark name.")
    @click.option("--tile-sizes", help="Override tile sizes, e.g. '8' or '4,8'.")
    @click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout.")
    @click.option("--exhaustive", is_flag=True, help="Enumerate every neighbour tile combination.")
    @click.option("--oracle-check", is_flag=True, help="Cross-check results by brute force.")
    @click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (MarsError, FileNotFoundError) as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _need_spec(spec_arg):
    if not spec_arg:
        raise click.UsageError("--spec is required")


@click.group()
@click.version_option(package_name="artifact", prog_name="tilemars")
def main():
    """Flow-out/flow-in sets and MARS partitions of tiled uniform-dependence loops."""


@main.command("validate")
@common_options
def validate_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt):
    """Check tiling legality and the modelling hypotheses."""
    _need_spec(spec_arg)
    spec = _load(spec_arg, tile_sizes)
    validate(spec)
    m = spec.crossing_matrix()
    if fmt == "json":
        _emit(_dump({"name": spec.name, "valid": True, "crossing_matrix": m.tolist()}), out)
    else:
        _emit(f"OK: {spec.name} (N={spec.dim}, T={spec.n_hyperplanes}, D={len(spec.dependences)}, "
              f"max crossing {int(m.max())} <= min tile size {min(spec.tile_sizes)})", out)


def _flow_command(spec: ProblemSpec, result, fmt, out, oracle_check, which):
    names = spec.iterator_names
    tile = lattice.sample_tile(spec)
    pts = lattice.tile_points(spec, tile)
    volume = int(result.whole.contains(pts).sum())
    if oracle_check:
        got = {tuple(p) for p in pts[result.whole.contains(pts)].tolist()}
        expected = oracle.oracle_flow_out(spec, tile) if which == "flow-out" else oracle.oracle_readers(spec, tile)
        if got != expected:
            raise OracleMismatch(f"{which} of tile {tile} differs from brute force")
    parts = [
        {"hyperplane": form_text(spec.hyperplanes[k].normal, names), "dependence": list(spec.dependences[j]),
         "set": qs.to_text(names)}
        for (k, j), qs in result.per_dependence.items() if qs.disjuncts
    ]
    if fmt == "json":
        _emit(_dump({"name": spec.name, which: result.whole.to_text(names), "per_dependence": parts,
                     "sample_tile": list(tile), "points_per_tile": volume}), out)
        return
    lines = [f"{which} of {spec.name}: {result.whole.to_text(names)}"]
    for p in parts:
        lines.append(f"  b={tuple(p['dependence'])} across {p['hyperplane']}: {p['set']}")
    lines.append(f"points per tile (sample tile {tile}): {volume}")
    _emit("\n".join(lines), out)


@main.command("flow-out")
@common_options
def flow_out_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt):
    """Domain-wide flow-out set and its per-dependence contributions."""
    _need_spec(spec_arg)
    spec = _load(spec_arg, tile_sizes)
    _flow_command(spec, flow_out(spec), fmt, out, oracle_check, "flow-out")


@main.command("flow-in")
@common_options
def flow_in_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt):
    """Points reading from other tiles (flow-out with reversed dependences)."""
    _need_spec(spec_arg)
    spec = _load(spec_arg, tile_sizes)
    _flow_command(spec, flow_in(spec), fmt, out, oracle_check, "flow-in")


@main.command("mars")
@common_options
def mars_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt):
    """List every MARS with its consumers, closed form and size per tile."""
    _need_spec(spec_arg)
    spec = _load(spec_arg, tile_sizes)
    partition = mars_partition(spec, exhaustive=exhaustive)
    tile = lattice.sample_tile(spec)
    if oracle_check:
        check_against_oracle(partition, tile)
    blocks = restrict_to_tile(partition, tile)
    names = spec.iterator_names
    rows = [
        {"signature": [list(o) for o in m.signature], "closed_form": m.set.to_text(names),
         "points_per_tile": int(len(blocks[m.signature]))}
        for m in partition
    ]
    if fmt == "json":
        _emit(_dump({"name": spec.name, "sample_tile": list(tile), "mars": rows}), out)
        return
    width = max((len(format_signature(m.signature)) for m in partition), default=0)
    lines = [f"{len(partition)} MARS for {spec.name} (sample tile {tile}):"]
    for m, row in zip(partition, rows):
        lines.append(f"  {format_signature(m.signature).ljust(width)}  {row['points_per_tile']:>5}  "
                     f"{row['closed_form']}")
    _emit("\n".join(lines), out)


@main.command("stats")
@common_options
def stats_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt):
    """Statistics for one configuration (always cross-checked by brute force)."""
    _need_spec(spec_arg)
    spec = _load(spec_arg, tile_sizes)
    report = analyze(spec, exhaustive=exhaustive)
    _emit(_dump(report.to_dict()) if fmt == "json" else format_report(report), out)


@main.command("render")
@common_options
@click.option("--start", help="First tile of the window (2-D) or the sample tile (3-D), e.g. '2,2'.")
@click.option("--extent", type=int, default=3, show_default=True, help="Tiles per family in the 2-D window.")
def render_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt, start, extent):
    """SVG picture for 2-D spaces, JSON point dump of one tile for 3-D spaces."""
    _need_spec(spec_arg)
    spec = _load(spec_arg, tile_sizes)
    partition = mars_partition(spec, exhaustive=exhaustive)
    start_tile = _parse_ints(start, "--start")
    if oracle_check:
        check_against_oracle(partition, start_tile or lattice.sample_tile(spec))
    if spec.dim == 3:
        _emit(render_points3d(partition, start_tile), out)
    else:
        _emit(render_svg2d(partition, start_tile, extent), out)


@main.command("bench")
@common_options
def bench_cmd(spec_arg, tile_sizes, out, exhaustive, oracle_check, fmt):
    """Run every bundled benchmark and print the summary table."""
    specs = benchmarks.load_all() if not spec_arg else [_load(spec_arg, None)]
    sizes = _parse_ints(tile_sizes, "--tile-sizes")
    reports = [analyze(s, sizes or None, exhaustive=exhaustive) for s in specs]
    if fmt == "json":
        _emit(_dump([r.to_dict() for r in reports]), out)
    else:
        _emit(format_table(reports, timings=True), out)


if __name__ == "__main__":
    main()
