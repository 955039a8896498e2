"""Per-configuration statistics and cross-checks against the oracle."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import lattice, oracle
from .algorithms import (
    MarsPartition,
    evaluation_grid,
    flow_in,
    flow_out,
    mars_partition,
    restrict_to_tile,
)
from .errors import OracleMismatch
from .model import ProblemSpec, Signature, format_signature, validate
from .qset import form_text


@dataclass(frozen=True)
class MarsStats:
    signature: Signature
    points_per_tile: int
    dimensionality: int
    closed_form: str

    @property
    def is_singleton(self) -> bool:
        return self.points_per_tile == 1


@dataclass
class ConfigReport:
    name: str
    dim: int
    dependences: list[tuple[int, ...]]
    hyperplanes: list[tuple[int, ...]]
    tile_sizes: list[int]
    sample_tile: tuple[int, ...]
    consumer_tiles: int
    mars_raw: int
    mars_nonempty: int
    singletons: int
    mars: list[MarsStats]
    empty_in_tile: list[Signature]
    flow_out_volume_per_tile: int
    reader_volume_per_tile: int
    flow_in_volume_per_tile: int
    naive_overlap_volume: int
    candidates: int
    exhaustive: bool
    hyperplane_text: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def summary_row(self) -> tuple[int, int, int]:
        return (self.consumer_tiles, self.mars_nonempty, self.singletons)

    def to_dict(self) -> dict:
        """JSON-ready dict; timing is left out so output is reproducible."""
        return {
            "name": self.name,
            "consumer_tiles": self.consumer_tiles,
            "mars_raw": self.mars_raw,
            "mars_nonempty": self.mars_nonempty,
            "singletons": self.singletons,
            "mars": [
                {
                    "signature": [list(o) for o in m.signature],
                    "closed_form": m.closed_form,
                    "points_per_tile": m.points_per_tile,
                    "dimensionality": m.dimensionality,
                }
                for m in self.mars
            ],
            "dim": self.dim,
            "dependences": [list(b) for b in self.dependences],
            "hyperplanes": [list(c) for c in self.hyperplanes],
            "tile_sizes": list(self.tile_sizes),
            "sample_tile": list(self.sample_tile),
            "empty_in_sample_tile": [[list(o) for o in sig] for sig in self.empty_in_tile],
            "flow_out_volume_per_tile": self.flow_out_volume_per_tile,
            "reader_volume_per_tile": self.reader_volume_per_tile,
            "flow_in_volume_per_tile": self.flow_in_volume_per_tile,
            "naive_overlap_volume": self.naive_overlap_volume,
            "candidates": self.candidates,
            "exhaustive": self.exhaustive,
        }


def _as_set(points: np.ndarray) -> frozenset:
    return frozenset(tuple(int(v) for v in p) for p in points)


def affine_rank(points: Sequence[Sequence[int]]) -> int:
    """Dimension of the affine hull of a non-empty point set."""
    pts = np.array(sorted(points), dtype=np.int64)
    if len(pts) <= 1:
        return 0
    return int(np.linalg.matrix_rank((pts - pts[0]).astype(float)))


def check_against_oracle(partition: MarsPartition, tile: Sequence[int]) -> dict[Signature, frozenset]:
    """Blocks of ``tile`` from the symbolic partition, verified by brute force.

    Raises :class:`OracleMismatch` on any difference in blocks, signatures or
    in the set of signatures present anywhere in the domain.
    """
    spec = partition.spec
    symbolic = {
        sig: _as_set(pts) for sig, pts in restrict_to_tile(partition, tile).items() if len(pts)
    }
    truth = oracle.oracle_mars(spec, tile)
    if symbolic != dict(truth):
        only_sym = sorted(set(symbolic) - set(truth))
        only_orc = sorted(set(truth) - set(symbolic))
        raise OracleMismatch(
            f"{spec.name}: tile {tuple(tile)} partition differs "
            f"(symbolic-only {only_sym}, oracle-only {only_orc})"
        )
    grid = evaluation_grid(spec)
    domain_wide = oracle.oracle_signatures(spec, grid.points.tolist())
    if domain_wide != {m.signature for m in partition}:
        raise OracleMismatch(f"{spec.name}: domain-wide signatures differ from the oracle")
    stray = {o for sig in domain_wide for o in sig} - set(partition.consumers)
    if stray:
        raise OracleMismatch(f"{spec.name}: consumers {sorted(stray)} missed by pruning")
    return symbolic


def analyze(spec: ProblemSpec, tile_sizes: Sequence[int] | int | None = None,
            exhaustive: bool = False) -> ConfigReport:
    start = time.perf_counter()
    if tile_sizes is not None:
        spec = spec.with_tile_sizes(tile_sizes)
    validate(spec)
    partition = mars_partition(spec, exhaustive=exhaustive)
    tile = lattice.sample_tile(spec)
    blocks = check_against_oracle(partition, tile)

    pts = lattice.tile_points(spec, tile)
    out_pts = _as_set(pts[flow_out(spec).whole.contains(pts)])
    if out_pts != oracle.oracle_flow_out(spec, tile):
        raise OracleMismatch(f"{spec.name}: flow-out of tile {tile} differs from the oracle")
    fin = flow_in(spec)
    readers = _as_set(pts[fin.whole.contains(pts)])
    if readers != oracle.oracle_readers(spec, tile):
        raise OracleMismatch(f"{spec.name}: reader set of tile {tile} differs from the oracle")
    producers = set()
    for (k, j), part in fin.per_dependence.items():
        b = np.array(spec.dependences[j], dtype=np.int64)
        producers |= _as_set(pts[part.contains(pts)] - b)
    if producers != oracle.oracle_flow_in(spec, tile):
        raise OracleMismatch(f"{spec.name}: flow-in of tile {tile} differs from the oracle")

    names = spec.iterator_names
    stats = [
        MarsStats(m.signature, len(blocks[m.signature]), affine_rank(blocks[m.signature]),
                  m.set.to_text(names))
        for m in partition if m.signature in blocks
    ]
    reads = oracle.oracle_consumer_reads(spec, tile)
    return ConfigReport(
        name=spec.name,
        dim=spec.dim,
        dependences=list(spec.dependences),
        hyperplanes=[h.normal for h in spec.hyperplanes],
        tile_sizes=list(spec.tile_sizes),
        sample_tile=tuple(tile),
        consumer_tiles=len(partition.consumers),
        mars_raw=len(partition),
        mars_nonempty=len(stats),
        singletons=sum(s.is_singleton for s in stats),
        mars=stats,
        empty_in_tile=[m.signature for m in partition if m.signature not in blocks],
        flow_out_volume_per_tile=len(out_pts),
        reader_volume_per_tile=len(readers),
        flow_in_volume_per_tile=len(producers),
        naive_overlap_volume=sum(len(p) for p in reads.values()),
        candidates=partition.candidates,
        exhaustive=exhaustive,
        hyperplane_text=[form_text(h.normal, names) for h in spec.hyperplanes],
        seconds=time.perf_counter() - start,
    )


def stability_check(spec: ProblemSpec, sizes: Sequence[Sequence[int] | int]) -> bool:
    """True iff (consumer tiles, MARS, singletons) agree for every tile-size choice."""
    rows = {analyze(spec, s).summary_row for s in sizes}
    return len(rows) == 1


# --- text output -------------------------------------------------------------

TABLE_HEADER = ("Dims", "Application", "Dependences", "Tiling hyperplanes", "Sizes",
                "# Cons. tiles", "Nb MARS", "Singletons")


def _mars_cell(r: ConfigReport) -> str:
    if r.mars_raw == r.mars_nonempty:
        return str(r.mars_raw)
    return f"{r.mars_raw} ({r.mars_nonempty})"


def table_rows(reports: Sequence[ConfigReport], timings: bool = False) -> list[tuple[str, ...]]:
    rows = []
    for r in reports:
        row = (
            str(r.dim),
            r.name,
            ", ".join("(" + ", ".join(map(str, b)) + ")" for b in r.dependences),
            ", ".join(r.hyperplane_text),
            "x".join(map(str, r.tile_sizes)),
            str(r.consumer_tiles),
            _mars_cell(r),
            str(r.singletons),
        )
        if timings:
            row += (f"{r.seconds:.2f}",)
        rows.append(row)
    return rows


def format_table(reports: Sequence[ConfigReport], timings: bool = False) -> str:
    header = TABLE_HEADER + (("Time (s)",) if timings else ())
    rows = [header] + table_rows(reports, timings)
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    lines = []
    for n, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def format_report(r: ConfigReport) -> str:
    lines = [
        f"{r.name}: N={r.dim}, tile sizes {list(r.tile_sizes)}, sample tile {r.sample_tile}",
        f"  consumer tiles        {r.consumer_tiles}",
        f"  MARS (domain-wide)    {r.mars_raw}",
        f"  MARS (sample tile)    {r.mars_nonempty}",
        f"  singletons            {r.singletons}",
        f"  flow-out per tile     {r.flow_out_volume_per_tile}",
        f"  naive read volume     {r.naive_overlap_volume}",
        f"  flow-in per tile      {r.flow_in_volume_per_tile}",
        "",
    ]
    width = max((len(format_signature(m.signature)) for m in r.mars), default=0)
    for m in r.mars:
        lines.append(
            f"  {format_signature(m.signature).ljust(width)}  {m.points_per_tile:>5} pts  "
            f"dim {m.dimensionality}  {m.closed_form}"
        )
    for sig in r.empty_in_tile:
        lines.append(f"  {format_signature(sig).ljust(width)}  (empty in sample tile)")
    return "\n".join(lines)
