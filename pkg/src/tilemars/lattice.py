"""Vectorised lattice-point helpers: tile coordinates, tile enumeration, boxes.

Bounding boxes of tiles come from linear programming (scipy's HiGHS), so any
set of normals spanning the space works, including over-determined diamond
tilings with more families than dimensions.
"""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import BoxTooLarge

if TYPE_CHECKING:
    from .model import ProblemSpec

DEFAULT_POINT_BUDGET = 10**8
_LP_EPS = 1e-7


def tile_coords(points: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    """Tile coordinates (one row per point) using floor division."""
    points = np.asarray(points, dtype=np.int64).reshape(-1, spec.dim)
    sizes = np.array(spec.tile_sizes, dtype=np.int64)
    return np.floor_divide(points @ spec.normals.T, sizes)


def box_points(lower: Sequence[int], upper: Sequence[int], budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    """All integer points of the inclusive box, row-major."""
    extents = [int(hi) - int(lo) + 1 for lo, hi in zip(lower, upper)]
    if any(e <= 0 for e in extents):
        return np.zeros((0, len(extents)), dtype=np.int64)
    count = int(np.prod(extents, dtype=object))
    if count > budget:
        raise BoxTooLarge(f"box of {count} points exceeds budget {budget}")
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(lower, upper)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def product_points(axes: Sequence[np.ndarray], budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    count = int(np.prod([len(a) for a in axes], dtype=object))
    if count > budget:
        raise BoxTooLarge(f"grid of {count} points exceeds budget {budget}")
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1).astype(np.int64)


def lp_bounding_box(A_ub: np.ndarray, b_ub: np.ndarray, bounds=None):
    """Integer box enclosing ``{x : A_ub x <= b_ub}``.

    Returns ``(lower, upper)`` lists whose entries are ``None`` where the
    polyhedron is unbounded, or ``None`` when it is empty.
    """
    A_ub = np.asarray(A_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    n = A_ub.shape[1]
    if bounds is None:
        bounds = [(None, None)] * n
    lower: list[int | None] = []
    upper: list[int | None] = []
    for d in range(n):
        bounds_d = []
        for sign in (1.0, -1.0):
            cost = np.zeros(n)
            cost[d] = sign
            res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
            if res.status == 2:
                return None
            if res.status == 3:
                bounds_d.append(None)
            elif res.status != 0:
                raise RuntimeError(f"linear program failed: {res.message}")
            else:
                bounds_d.append(sign * res.fun)
        lo, hi = bounds_d
        lower.append(None if lo is None else int(np.ceil(lo - _LP_EPS)))
        upper.append(None if hi is None else int(np.floor(hi + _LP_EPS)))
    return lower, upper


def slab_system(spec: ProblemSpec, tile: Sequence[int], extent: Sequence[int] | None = None):
    """Inequalities ``A x <= b`` describing the tiles from ``tile`` to ``tile + extent - 1``."""
    normals = spec.normals
    sizes = np.array(spec.tile_sizes, dtype=np.int64)
    tile = np.asarray(tile, dtype=np.int64)
    extent = np.ones_like(tile) if extent is None else np.asarray(extent, dtype=np.int64)
    low = sizes * tile
    high = sizes * (tile + extent) - 1
    return np.vstack([normals, -normals]), np.concatenate([high, -low])


def region_points(spec: ProblemSpec, tile: Sequence[int], extent: Sequence[int] | None = None,
                  budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    """Points whose tile coordinates lie in ``[tile, tile + extent)``, clipped to the domain."""
    A, b = slab_system(spec, tile, extent)
    bounds = None
    if spec.domain is not None:
        bounds = list(zip(spec.domain.lower, spec.domain.upper))
    box = lp_bounding_box(A, b, bounds)
    if box is None:
        return np.zeros((0, spec.dim), dtype=np.int64)
    lower, upper = box
    if any(v is None for v in lower + upper):
        raise ValueError("tile is unbounded; normals must span the space")
    pts = box_points(lower, upper, budget)
    coords = tile_coords(pts, spec)
    tile = np.asarray(tile, dtype=np.int64)
    hi = tile + (1 if extent is None else np.asarray(extent, dtype=np.int64))
    keep = np.all((coords >= tile) & (coords < hi), axis=1)
    return pts[keep]


def tile_points(spec: ProblemSpec, tile: Sequence[int], budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    """All domain points of one tile, in lexicographic order."""
    return region_points(spec, tile, None, budget)


def find_full_tile(spec: ProblemSpec) -> tuple[int, ...] | None:
    """A tile lying entirely inside the bounded domain, preferring the centre."""
    dom = spec.domain
    if dom is None:
        return sample_tile(spec)
    infinite = spec.with_infinite_domain()
    corners = np.array(list(itertools.product(*zip(dom.lower, dom.upper))), dtype=np.int64)
    corner_tiles = tile_coords(corners, spec)
    lo_t, hi_t = corner_tiles.min(axis=0), corner_tiles.max(axis=0)
    center = np.array([(lo + hi) // 2 for lo, hi in zip(dom.lower, dom.upper)])
    c_tile = tile_coords(center, spec)[0]
    radius = int(np.max(np.maximum(hi_t - c_tile, c_tile - lo_t)))
    for r in range(radius + 1):
        for delta in itertools.product(range(-r, r + 1), repeat=spec.n_hyperplanes):
            if max((abs(v) for v in delta), default=0) != r:
                continue
            tile = c_tile + np.array(delta)
            if np.any(tile < lo_t) or np.any(tile > hi_t):
                continue
            pts = tile_points(infinite, tile)
            if len(pts) and np.all((pts >= dom.lower) & (pts <= dom.upper)):
                return tuple(int(v) for v in tile)
    return None


def sample_tile(spec: ProblemSpec) -> tuple[int, ...]:
    """Representative tile: ``(2, ..., 2)`` in an infinite space, else a full tile."""
    if spec.domain is None:
        return (2,) * spec.n_hyperplanes
    return find_full_tile(spec)


def translation_period(spec: ProblemSpec) -> int:
    """An integer L such that shifting by ``L * e_d`` maps tiles onto tiles."""
    return int(np.lcm.reduce(np.array(spec.tile_sizes, dtype=np.int64)))
