"""Problem description: iteration space, uniform dependences and tiling.

A :class:`ProblemSpec` is immutable once built.  Structural checks (lengths,
non-zero vectors, positive tile sizes) happen at construction; the tiling
hypotheses are checked separately by :func:`validate`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, TypeVar

import numpy as np

from . import lattice
from .errors import EmptyDomain, IllegalTiling, LongDependence, SpecError, UnboundedTile

Vector = tuple[int, ...]
# Per-family 0/1 crossing pattern naming a neighbouring tile.
Offset = tuple[int, ...]
# Canonical (sorted, duplicate-free) tuple of offsets.
Signature = tuple[Offset, ...]

DEFAULT_ITERATORS = {1: ("i",), 2: ("i", "j"), 3: ("i", "j", "k")}

T = TypeVar("T")


def _int_vector(values: Iterable[int], what: str) -> Vector:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise SpecError(f"{what} must contain integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class Hyperplane:
    """A family of parallel tiling hyperplanes ``c.x = 0 (mod s)``."""

    normal: Vector
    tile_size: int

    def __post_init__(self):
        object.__setattr__(self, "normal", _int_vector(self.normal, "normal"))
        if not any(self.normal):
            raise SpecError("hyperplane normal must be non-zero")
        if int(self.tile_size) != self.tile_size or self.tile_size < 1:
            raise SpecError(f"tile size must be a positive integer, got {self.tile_size!r}")
        object.__setattr__(self, "tile_size", int(self.tile_size))


@dataclass(frozen=True)
class DomainBox:
    """Inclusive integer box ``lower <= x <= upper``."""

    lower: Vector
    upper: Vector

    def __post_init__(self):
        object.__setattr__(self, "lower", _int_vector(self.lower, "domain lower"))
        object.__setattr__(self, "upper", _int_vector(self.upper, "domain upper"))
        if len(self.lower) != len(self.upper):
            raise SpecError("domain bounds have different lengths")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise SpecError("domain lower bound exceeds upper bound")

    def contains(self, x: Sequence[int]) -> bool:
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))

    @property
    def volume(self) -> int:
        return int(np.prod([hi - lo + 1 for lo, hi in zip(self.lower, self.upper)]))


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    dependences: tuple[Vector, ...]
    hyperplanes: tuple[Hyperplane, ...]
    domain: DomainBox | None = None  # None: infinite iteration space
    iterators: tuple[str, ...] | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise SpecError(f"dim must be a positive integer, got {self.dim!r}")
        deps = tuple(_int_vector(b, "dependence") for b in self.dependences)
        hyps = tuple(self.hyperplanes)
        if not deps:
            raise SpecError("at least one dependence vector is required")
        if not hyps:
            raise SpecError("at least one tiling hyperplane is required")
        for b in deps:
            if len(b) != self.dim:
                raise SpecError(f"dependence {b} does not have length {self.dim}")
            if not any(b):
                raise SpecError("dependence vectors must be non-zero")
        for h in hyps:
            if len(h.normal) != self.dim:
                raise SpecError(f"normal {h.normal} does not have length {self.dim}")
        if self.domain is not None and len(self.domain.lower) != self.dim:
            raise SpecError(f"domain bounds do not have length {self.dim}")
        if self.iterators is not None:
            its = tuple(str(n) for n in self.iterators)
            if len(its) != self.dim or len(set(its)) != self.dim:
                raise SpecError(f"need {self.dim} distinct iterator names, got {its}")
            object.__setattr__(self, "iterators", its)
        object.__setattr__(self, "dependences", deps)
        object.__setattr__(self, "hyperplanes", hyps)

    @property
    def n_hyperplanes(self) -> int:
        return len(self.hyperplanes)

    @property
    def normals(self) -> np.ndarray:
        return np.array([h.normal for h in self.hyperplanes], dtype=np.int64)

    @property
    def tile_sizes(self) -> tuple[int, ...]:
        return tuple(h.tile_size for h in self.hyperplanes)

    @property
    def iterator_names(self) -> tuple[str, ...]:
        if self.iterators is not None:
            return self.iterators
        return DEFAULT_ITERATORS.get(self.dim, tuple(f"x{d}" for d in range(self.dim)))

    def crossing_amount(self, k: int, b: Sequence[int]) -> int:
        """Scalar product of the k-th normal with ``b``."""
        return int(sum(c * v for c, v in zip(self.hyperplanes[k].normal, b)))

    def crossing_matrix(self) -> np.ndarray:
        """T x D matrix of scalar products between normals and dependences."""
        return self.normals @ np.array(self.dependences, dtype=np.int64).T

    def with_tile_sizes(self, sizes: int | Sequence[int]) -> ProblemSpec:
        if isinstance(sizes, int):
            sizes = [sizes] * self.n_hyperplanes
        sizes = list(sizes)
        if len(sizes) == 1:
            sizes = sizes * self.n_hyperplanes
        if len(sizes) != self.n_hyperplanes:
            raise SpecError(f"expected {self.n_hyperplanes} tile sizes, got {len(sizes)}")
        hyps = tuple(Hyperplane(h.normal, s) for h, s in zip(self.hyperplanes, sizes))
        return replace(self, hyperplanes=hyps)

    def with_infinite_domain(self) -> ProblemSpec:
        return replace(self, domain=None)


def validate(spec: ProblemSpec) -> ProblemSpec:
    """Check the tiling hypotheses and return ``spec`` unchanged.

    Every dependence must cross each hyperplane family forward and by at most
    one tile, the normals must span the space so tiles are bounded, and a
    bounded domain must contain at least one full tile.
    """
    m = spec.crossing_matrix()
    for k, h in enumerate(spec.hyperplanes):
        for j, b in enumerate(spec.dependences):
            if m[k, j] < 0:
                raise IllegalTiling(
                    f"dependence {b} crosses hyperplane {h.normal} backwards (m = {m[k, j]})"
                )
            if m[k, j] > h.tile_size:
                raise LongDependence(
                    f"dependence {b} jumps {m[k, j]} > tile size {h.tile_size} "
                    f"across hyperplane {h.normal}"
                )
    if np.linalg.matrix_rank(spec.normals) < spec.dim:
        raise UnboundedTile(f"normals of {spec.name!r} do not span dimension {spec.dim}")
    if spec.domain is not None and lattice.find_full_tile(spec) is None:
        raise EmptyDomain(f"domain of {spec.name!r} contains no full tile")
    return spec


def nontrivial_parts(items: Iterable[T]) -> list[tuple[T, ...]]:
    """All non-empty subsets of ``items``, smallest first, in input order."""
    items = list(dict.fromkeys(items))
    return [
        combo
        for r in range(1, len(items) + 1)
        for combo in itertools.combinations(items, r)
    ]


def make_signature(offsets: Iterable[Sequence[int]]) -> Signature:
    return tuple(sorted({tuple(int(v) for v in o) for o in offsets}))


def signature_key(sig: Signature):
    """Sort key ordering signatures by size, then lexicographically."""
    return (len(sig), sig)


def all_offsets(n_hyperplanes: int) -> list[Offset]:
    """The 2^T - 1 non-zero crossing patterns, ordered by popcount."""
    return sorted(
        (o for o in itertools.product((0, 1), repeat=n_hyperplanes) if any(o)),
        key=lambda o: (sum(o), tuple(-v for v in o)),
    )


def format_offset(offset: Sequence[int]) -> str:
    return "(" + ",".join(str(v) for v in offset) + ")"


def format_signature(sig: Signature) -> str:
    return "{" + ", ".join(format_offset(o) for o in sig) + "}"
