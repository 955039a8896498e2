"""SVG pictures of 2-D partitions and JSON point dumps of 3-D sample tiles."""

from __future__ import annotations

import json
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import lattice
from .algorithms import MarsPartition
from .errors import DimensionUnsupported
from .model import format_signature

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#dbdb8d", "#9edae5", "#393b79", "#637939", "#8c6d31",
    "#843c39", "#7b4173", "#3182bd", "#e6550d", "#31a354", "#756bb1", "#636363",
)
INTERIOR = "#d9d9d9"
CELL = 14


def mars_colors(partition: MarsPartition) -> dict:
    """Signature -> colour, by position in the (sorted) partition."""
    return {m.signature: PALETTE[n % len(PALETTE)] for n, m in enumerate(partition)}


def render_svg2d(partition: MarsPartition, start: Sequence[int] | None = None,
                 extent: int | Sequence[int] = 3) -> str:
    """Draw every point whose tile lies in ``[start, start + extent)``.

    One square per point, grey when the point is not in the flow-out, heavy
    lines between cells of different tiles, and a legend of signatures.
    """
    spec = partition.spec
    if spec.dim != 2:
        raise DimensionUnsupported(f"SVG rendering needs a 2-D space, {spec.name!r} has N={spec.dim}")
    start = tuple(lattice.sample_tile(spec) if start is None else start)
    if isinstance(extent, int):
        extent = [extent] * spec.n_hyperplanes
    pts = lattice.region_points(spec, start, extent)
    colors = mars_colors(partition)
    fill = np.full(len(pts), INTERIOR, dtype=object)
    for m in partition:
        fill[m.set.contains(pts)] = colors[m.signature]

    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    grid_w = int(x1 - x0 + 1) * CELL
    grid_h = int(y1 - y0 + 1) * CELL
    margin = 10
    legend_h = 20 * (len(partition) + 1)
    width = max(grid_w + 2 * margin, 420)
    height = grid_h + 2 * margin + legend_h

    def px(x):
        return margin + (int(x) - int(x0)) * CELL

    def py(y):
        # j grows upward
        return margin + (int(y1) - int(y)) * CELL

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(spec.name)}: MARS of tiles {start} to "
        f"{tuple(s + e - 1 for s, e in zip(start, extent))}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        '<g id="cells" stroke="#ffffff" stroke-width="0.5">',
    ]
    for (x, y), color in zip(pts.tolist(), fill):
        out.append(f'<rect x="{px(x)}" y="{py(y)}" width="{CELL}" height="{CELL}" fill="{color}"/>')
    out.append("</g>")

    coords = lattice.tile_coords(pts, spec)
    where = {tuple(p): tuple(c) for p, c in zip(pts.tolist(), coords.tolist())}
    out.append('<g id="tile-boundaries" stroke="black" stroke-width="2" stroke-linecap="square">')
    for (x, y), tc in where.items():
        right = where.get((x + 1, y))
        if right is not None and right != tc:
            out.append(f'<line x1="{px(x) + CELL}" y1="{py(y)}" x2="{px(x) + CELL}" y2="{py(y) + CELL}"/>')
        up = where.get((x, y + 1))
        if up is not None and up != tc:
            out.append(f'<line x1="{px(x)}" y1="{py(y)}" x2="{px(x) + CELL}" y2="{py(y)}"/>')
    out.append("</g>")

    names = spec.iterator_names
    ly = grid_h + 2 * margin
    out.append('<g id="legend" font-family="monospace" font-size="11">')
    out.append(f'<rect x="{margin}" y="{ly}" width="12" height="12" fill="{INTERIOR}"/>')
    out.append(f'<text x="{margin + 18}" y="{ly + 10}">not in flow-out</text>')
    for n, m in enumerate(partition, start=1):
        y = ly + 20 * n
        label = f"{format_signature(m.signature)}: {m.set.to_text(names)}"
        out.append(f'<rect x="{margin}" y="{y}" width="12" height="12" fill="{colors[m.signature]}"/>')
        out.append(f'<text x="{margin + 18}" y="{y + 10}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def points3d(partition: MarsPartition, tile: Sequence[int] | None = None) -> dict:
    """Explicit points of each MARS inside one tile, as plain data."""
    spec = partition.spec
    if spec.dim != 3:
        raise DimensionUnsupported(f"point dumps need a 3-D space, {spec.name!r} has N={spec.dim}")
    tile = tuple(lattice.sample_tile(spec) if tile is None else tile)
    pts = lattice.tile_points(spec, tile)
    colors = mars_colors(partition)
    groups = []
    for m in partition:
        inside = pts[m.set.contains(pts)]
        if not len(inside):
            continue
        groups.append({
            "signature": [list(o) for o in m.signature],
            "closed_form": m.set.to_text(spec.iterator_names),
            "color": colors[m.signature],
            "points": inside.tolist(),
        })
    return {
        "name": spec.name,
        "iterators": list(spec.iterator_names),
        "tile": list(tile),
        "tile_points": len(pts),
        "groups": groups,
    }


def render_points3d(partition: MarsPartition, tile: Sequence[int] | None = None) -> str:
    return json.dumps(points3d(partition, tile), ensure_ascii=False, indent=1) + "\n"
