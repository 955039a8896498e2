"""Symbolic flow-out / flow-in sets and their MARS partition.

All sets are domain-wide :class:`~tilemars.qset.QSet` objects; the part
belonging to one tile is obtained by intersecting with that tile, which
:func:`restrict_to_tile` does by enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import lattice
from .errors import CandidateExplosion
from .model import (
    Offset,
    ProblemSpec,
    Signature,
    all_offsets,
    make_signature,
    nontrivial_parts,
    signature_key,
    validate,
)
from .qset import PointGrid, QSet, intersect_all, is_empty, union_all

DEFAULT_CANDIDATE_BUDGET = 2**20


def domain_set(spec: ProblemSpec) -> QSet:
    if spec.domain is None:
        return QSet.universe(spec.dim)
    return QSet.box(spec.domain.lower, spec.domain.upper)


def shifted_domain(spec: ProblemSpec, shift: Sequence[int]) -> QSet:
    """``{x : x + shift in D}``."""
    if spec.domain is None:
        return QSet.universe(spec.dim)
    lower = [lo - v for lo, v in zip(spec.domain.lower, shift)]
    upper = [hi - v for hi, v in zip(spec.domain.upper, shift)]
    return QSet.box(lower, upper)


def crossing_condition(spec: ProblemSpec, k: int, b: Sequence[int]) -> QSet:
    """Residue condition under which ``x + b`` leaves x's slab of family ``k``.

    With ``m = c.b > 0`` this is ``-m <= (c.x mod s) - s < 0``, i.e. the top
    ``m`` residues.  ``m = 0`` never crosses.
    """
    h = spec.hyperplanes[k]
    m = spec.crossing_amount(k, b)
    if m <= 0:
        return QSet.empty(spec.dim)
    return QSet.residue(h.normal, h.tile_size, h.tile_size - m, h.tile_size - 1)


def reading_condition(spec: ProblemSpec, k: int, b: Sequence[int]) -> QSet:
    """Residue condition under which ``x - b`` lies in another slab of family ``k``."""
    h = spec.hyperplanes[k]
    m = spec.crossing_amount(k, b)
    if m <= 0:
        return QSet.empty(spec.dim)
    return QSet.residue(h.normal, h.tile_size, 0, m - 1)


def crossing_set(k: int, b: Sequence[int], spec: ProblemSpec) -> QSet:
    """Points whose dependence ``b`` crosses family ``k`` and stays in the domain."""
    cond = crossing_condition(spec, k, b)
    if not cond.disjuncts:
        return cond
    return domain_set(spec) & shifted_domain(spec, b) & cond


@dataclass(frozen=True)
class FlowResult:
    whole: QSet
    per_dependence: dict[tuple[int, int], QSet] = field(default_factory=dict)


def flow_out(spec: ProblemSpec) -> FlowResult:
    """Union over families and dependences of the per-dependence crossing sets."""
    validate(spec)
    per = {
        (k, j): crossing_set(k, b, spec)
        for k in range(spec.n_hyperplanes)
        for j, b in enumerate(spec.dependences)
    }
    return FlowResult(union_all(spec.dim, per.values()), per)


def flow_in(spec: ProblemSpec) -> FlowResult:
    """Same construction with every dependence reversed.

    The result holds the points of each tile that read a value produced in
    another tile; entry ``(k, j)`` shifted by ``-b_j`` gives the producers,
    i.e. the classic flow-in of the tile.
    """
    validate(spec)
    per = {}
    for k in range(spec.n_hyperplanes):
        for j, b in enumerate(spec.dependences):
            cond = reading_condition(spec, k, b)
            if cond.disjuncts:
                cond = domain_set(spec) & shifted_domain(spec, [-v for v in b]) & cond
            per[(k, j)] = cond
    return FlowResult(union_all(spec.dim, per.values()), per)


def evaluation_grid(spec: ProblemSpec, budget: int = lattice.DEFAULT_POINT_BUDGET) -> PointGrid:
    """A finite grid on which every set built here is decided exactly.

    Every residue constraint uses a normal ``c_k`` modulo ``s_k``, so shifting
    by ``P_d`` along axis ``d`` (``P_d = lcm_k s_k / gcd(c_kd, s_k)``) changes
    nothing.  In a bounded domain, only coordinates within ``max|b_d| + P_d``
    of either bound are needed: anything deeper shifts by whole periods onto
    them without crossing a domain guard.
    """
    periods = [1] * spec.dim
    for h in spec.hyperplanes:
        periods = [math.lcm(p, h.tile_size // math.gcd(c, h.tile_size)) for p, c in zip(periods, h.normal)]
    if spec.domain is None:
        axes = [np.arange(p, dtype=np.int64) for p in periods]
    else:
        deps = np.abs(np.array(spec.dependences, dtype=np.int64))
        axes = []
        for d, (lo, hi) in enumerate(zip(spec.domain.lower, spec.domain.upper)):
            reach = int(deps[:, d].max()) + periods[d]
            near = set(range(lo, min(hi, lo + reach - 1) + 1))
            near |= set(range(max(lo, hi - reach + 1), hi + 1))
            axes.append(np.array(sorted(near), dtype=np.int64))
    return PointGrid(lattice.product_points(axes, budget))


def exact_crossing_set(spec: ProblemSpec, offset: Offset, b: Sequence[int]) -> QSet:
    """Points from which ``b`` crosses exactly the families flagged in ``offset``.

    Families with ``m = 0`` are never crossed, so their negation is implicit.
    """
    parts = [domain_set(spec), shifted_domain(spec, b)]
    for k, flag in enumerate(offset):
        cond = crossing_condition(spec, k, b)
        if flag:
            parts.append(cond)
        elif cond.disjuncts:
            parts.append(cond.complement())
    return intersect_all(spec.dim, parts)


def realizable_consumers(spec: ProblemSpec) -> tuple[Offset, ...]:
    """Neighbour tiles that some dependence actually reaches from some point."""
    validate(spec)
    T = spec.n_hyperplanes
    found = set()
    for b in spec.dependences:
        crossable = [k for k in range(T) if spec.crossing_amount(k, b) > 0]
        for subset in nontrivial_parts(crossable):
            offset = tuple(1 if k in subset else 0 for k in range(T))
            if offset in found:
                continue
            if not is_empty(exact_crossing_set(spec, offset, b), spec):
                found.add(offset)
    return tuple(o for o in all_offsets(T) if o in found)


@dataclass(frozen=True)
class Mars:
    signature: Signature
    set: QSet


@dataclass(frozen=True)
class MarsPartition:
    spec: ProblemSpec
    mars: tuple[Mars, ...]
    consumers: tuple[Offset, ...]
    candidates: int
    exhaustive: bool

    def __iter__(self) -> Iterator[Mars]:
        return iter(self.mars)

    def __len__(self) -> int:
        return len(self.mars)

    def __getitem__(self, i: int) -> Mars:
        return self.mars[i]

    def by_signature(self) -> dict[Signature, Mars]:
        return {m.signature: m for m in self.mars}


def mars_partition(spec: ProblemSpec, exhaustive: bool = False,
                   candidate_budget: int = DEFAULT_CANDIDATE_BUDGET) -> MarsPartition:
    """Partition the flow-out into sets sharing one exact set of consumer tiles.

    Each candidate is a non-empty set ``I`` of neighbour tiles.  Its MARS is
    the intersection of "some dependence reaches exactly tile T" over ``T`` in
    ``I`` with "no dependence reaches tile T" over the excluded tiles.
    Candidates are drawn from the realizable consumers unless ``exhaustive``,
    in which case all ``2^T - 1`` neighbours are used.

    Emptiness of every candidate is decided on :func:`evaluation_grid` with
    bitset masks; closed forms are then built only for the non-empty ones.
    """
    validate(spec)
    consumers = realizable_consumers(spec)
    tiles = all_offsets(spec.n_hyperplanes) if exhaustive else list(consumers)
    n_candidates = 2 ** len(tiles) - 1
    if n_candidates > candidate_budget:
        raise CandidateExplosion(
            f"{n_candidates} candidate signatures exceed the budget of {candidate_budget}"
        )
    grid = evaluation_grid(spec)
    dom = domain_set(spec)
    dom_mask = grid.mask(dom)

    exact = {(t, j): exact_crossing_set(spec, tile, b)
             for t, tile in enumerate(tiles) for j, b in enumerate(spec.dependences)}
    reached = [union_all(spec.dim, (exact[t, j] for j in range(len(spec.dependences))))
               for t in range(len(tiles))]
    reached_mask = [grid.mask(u) for u in reached]
    missed_mask = [dom_mask & ~m for m in reached_mask]

    found: list[tuple[tuple[int, ...], int]] = []
    for chosen in nontrivial_parts(range(len(tiles))):
        inside = set(chosen)
        bits = dom_mask
        for t in range(len(tiles)):
            bits &= reached_mask[t] if t in inside else missed_mask[t]
            if not bits:
                break
        if bits:
            found.append((chosen, bits))

    mars = []
    for chosen, bits in found:
        qs = _candidate_set(spec, grid, dom, chosen, tiles, exact, reached)
        if grid.mask(qs) != bits:
            raise AssertionError("closed form disagrees with candidate mask")
        mars.append(Mars(make_signature(tiles[t] for t in chosen), qs))
    mars.sort(key=lambda m: signature_key(m.signature))
    return MarsPartition(spec, tuple(mars), consumers, n_candidates, exhaustive)


def _candidate_set(spec, grid: PointGrid, dom: QSet, chosen, tiles, exact, reached) -> QSet:
    inside = set(chosen)
    factors = [reached[t] for t in chosen]
    for t in range(len(tiles)):
        if t in inside:
            continue
        for j in range(len(spec.dependences)):
            factors.append(exact[t, j].complement())
    acc = dom
    for f in factors:
        if grid.mask(acc) & ~grid.mask(f) == 0:
            continue
        acc = grid.prune(acc & f)
    return grid.simplify(acc)


def restrict_to_tile(partition: MarsPartition, tile: Sequence[int]) -> dict[Signature, np.ndarray]:
    """Points of ``tile`` in each MARS, keyed by signature (empty arrays kept)."""
    pts = lattice.tile_points(partition.spec, tile)
    return {m.signature: pts[m.set.contains(pts)] for m in partition}


def tile_volume(qset: QSet, spec: ProblemSpec, tile: Sequence[int]) -> int:
    pts = lattice.tile_points(spec, tile)
    return int(qset.contains(pts).sum())
