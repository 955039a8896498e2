"""Brute-force ground truth over explicit lattice points.

Everything here works point by point in plain Python: tile membership is
floor division, crossings are tile-coordinate comparisons, and MARS are the
groups of flow-out points sharing one exact set of consumer tiles.  None of
it touches :mod:`tilemars.qset`, so it can check the symbolic engine.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyTile
from .model import Offset, ProblemSpec, Signature, make_signature

Point = tuple[int, ...]
PointSet = frozenset


def tile_coord(x: Sequence[int], spec: ProblemSpec) -> tuple[int, ...]:
    return tuple(
        sum(c * v for c, v in zip(h.normal, x)) // h.tile_size for h in spec.hyperplanes
    )


def in_domain(x: Sequence[int], spec: ProblemSpec) -> bool:
    return spec.domain is None or spec.domain.contains(x)


def _add(x: Sequence[int], b: Sequence[int]) -> Point:
    return tuple(u + v for u, v in zip(x, b))


def crosses(x: Sequence[int], b: Sequence[int], k: int, spec: ProblemSpec) -> bool:
    """Whether ``x + b`` lies in another slab of hyperplane family ``k``."""
    h = spec.hyperplanes[k]
    before = sum(c * v for c, v in zip(h.normal, x)) // h.tile_size
    after = sum(c * v for c, v in zip(h.normal, _add(x, b))) // h.tile_size
    return before != after


def crosses_residue(x: Sequence[int], b: Sequence[int], k: int, spec: ProblemSpec) -> bool:
    """Residue form of :func:`crosses`, for forward dependences (``m >= 0``)."""
    h = spec.hyperplanes[k]
    m = spec.crossing_amount(k, b)
    r = sum(c * v for c, v in zip(h.normal, x)) % h.tile_size
    return m > 0 and r >= h.tile_size - m


def _solve_exact(rows: list[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    """Gauss-Jordan over the rationals for a square non-singular system."""
    n = len(rows)
    a = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [u - f * v for u, v in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _independent_rows(spec: ProblemSpec) -> list[int]:
    chosen: list[int] = []
    for k in range(spec.n_hyperplanes):
        trial = chosen + [k]
        rows = [spec.hyperplanes[i].normal for i in trial]
        if _rank(rows) == len(trial):
            chosen = trial
        if len(chosen) == spec.dim:
            return chosen
    raise ValueError("hyperplane normals do not span the iteration space")


def _rank(rows: list[Sequence[int]]) -> int:
    m = [[Fraction(v) for v in row] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [u - f * v for u, v in zip(m[r], m[rank])]
        rank += 1
    return rank


def enumerate_tile(spec: ProblemSpec, tile: Sequence[int]) -> list[Point]:
    """Domain points of ``tile`` in lexicographic order.

    The tile lies inside the parallelepiped cut out by any spanning subset of
    its slabs; that parallelepiped's vertices give a search box.
    """
    rows = _independent_rows(spec)
    normals = [spec.hyperplanes[k].normal for k in rows]
    ranges = [
        (tile[k] * spec.hyperplanes[k].tile_size, (tile[k] + 1) * spec.hyperplanes[k].tile_size - 1)
        for k in rows
    ]
    vertices = [_solve_exact(normals, corner) for corner in itertools.product(*ranges)]
    lower = [min(v[d] for v in vertices) for d in range(spec.dim)]
    upper = [max(v[d] for v in vertices) for d in range(spec.dim)]
    if spec.domain is not None:
        lower = [max(lo, d) for lo, d in zip(lower, spec.domain.lower)]
        upper = [min(hi, d) for hi, d in zip(upper, spec.domain.upper)]
    axes = [range(math.ceil(lo), math.floor(hi) + 1) for lo, hi in zip(lower, upper)]
    tile = tuple(tile)
    return [x for x in itertools.product(*axes) if tile_coord(x, spec) == tile]


def _require_points(spec: ProblemSpec, tile: Sequence[int]) -> list[Point]:
    pts = enumerate_tile(spec, tile)
    if not pts:
        raise EmptyTile(f"tile {tuple(tile)} of {spec.name!r} holds no domain point")
    return pts


def consumer_signature(x: Sequence[int], spec: ProblemSpec) -> Signature:
    """Offsets of the other tiles reading the value produced at ``x``."""
    here = tile_coord(x, spec)
    offsets = []
    for b in spec.dependences:
        y = _add(x, b)
        if not in_domain(y, spec):
            continue
        there = tile_coord(y, spec)
        if there != here:
            offsets.append(tuple(t - h for t, h in zip(there, here)))
    return make_signature(offsets)


def producer_signature(x: Sequence[int], spec: ProblemSpec) -> Signature:
    """Offsets (non-positive) of the other tiles whose values ``x`` reads."""
    here = tile_coord(x, spec)
    offsets = []
    for b in spec.dependences:
        y = tuple(u - v for u, v in zip(x, b))
        if not in_domain(y, spec):
            continue
        there = tile_coord(y, spec)
        if there != here:
            offsets.append(tuple(t - h for t, h in zip(there, here)))
    return make_signature(offsets)


def oracle_flow_out(spec: ProblemSpec, tile: Sequence[int]) -> PointSet:
    return frozenset(x for x in _require_points(spec, tile) if consumer_signature(x, spec))


def oracle_flow_in(spec: ProblemSpec, tile: Sequence[int]) -> PointSet:
    """Points outside ``tile`` whose values the tile reads."""
    tile = tuple(tile)
    out = set()
    for x in _require_points(spec, tile):
        for b in spec.dependences:
            y = tuple(u - v for u, v in zip(x, b))
            if in_domain(y, spec) and tile_coord(y, spec) != tile:
                out.add(y)
    return frozenset(out)


def oracle_readers(spec: ProblemSpec, tile: Sequence[int]) -> PointSet:
    """Points of ``tile`` reading at least one value from another tile."""
    return frozenset(x for x in _require_points(spec, tile) if producer_signature(x, spec))


def group_by(points: Iterable[Point], key) -> dict[Signature, PointSet]:
    groups: dict[Signature, set] = defaultdict(set)
    for x in points:
        sig = key(x)
        if sig:
            groups[sig].add(x)
    return {sig: frozenset(pts) for sig, pts in sorted(groups.items(), key=lambda kv: (len(kv[0]), kv[0]))}


def oracle_mars(spec: ProblemSpec, tile: Sequence[int]) -> dict[Signature, PointSet]:
    """Flow-out points of ``tile`` grouped by exact consumer signature."""
    return group_by(_require_points(spec, tile), lambda x: consumer_signature(x, spec))


def oracle_reader_groups(spec: ProblemSpec, tile: Sequence[int]) -> dict[Signature, PointSet]:
    """Reader points of ``tile`` grouped by exact producer signature."""
    return group_by(_require_points(spec, tile), lambda x: producer_signature(x, spec))


def oracle_consumer_reads(spec: ProblemSpec, tile: Sequence[int]) -> dict[Offset, PointSet]:
    """For each consumer tile, the points of ``tile`` it reads."""
    here = tuple(tile)
    reads: dict[Offset, set] = defaultdict(set)
    for x in _require_points(spec, tile):
        for b in spec.dependences:
            y = _add(x, b)
            if not in_domain(y, spec):
                continue
            there = tile_coord(y, spec)
            if there != here:
                reads[tuple(t - h for t, h in zip(there, here))].add(x)
    return {o: frozenset(p) for o, p in sorted(reads.items())}


def oracle_signatures(spec: ProblemSpec, points: Iterable[Sequence[int]]) -> set[Signature]:
    """Distinct non-empty consumer signatures over arbitrary points."""
    sigs = set()
    for x in points:
        x = tuple(int(v) for v in x)
        if in_domain(x, spec):
            sig = consumer_signature(x, spec)
            if sig:
                sigs.add(sig)
    return sigs


def oracle_consumers(spec: ProblemSpec, points: Iterable[Sequence[int]]) -> set[Offset]:
    return {o for sig in oracle_signatures(spec, points) for o in sig}
