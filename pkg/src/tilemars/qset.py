"""Quasi-affine integer sets in disjunctive normal form.

A :class:`QSet` is a finite union of :class:`Conjunct` objects, each a
conjunction of atoms.  Two atom kinds exist:

* :class:`AffineIneq` -- ``a.x + c >= 0``
* :class:`ResidueInterval` -- ``lo <= (f.x mod s) <= hi`` with the residue in ``[0, s)``

There is no canonical form.  Emptiness is decided by enumerating one period
of the residue constraints, clipped by the affine ones; see :func:`is_empty`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence, Union

import numpy as np

from . import lattice
from .errors import SetTooComplex, UnsupportedSet

if TYPE_CHECKING:
    from .model import ProblemSpec

MAX_DISJUNCTS = 10**5
_ABSORB_LIMIT = 400

Vector = tuple[int, ...]


def _dot(a: Sequence[int], x: Sequence[int]) -> int:
    return sum(u * v for u, v in zip(a, x))


@dataclass(frozen=True)
class AffineIneq:
    """``coeffs . x + const >= 0``."""

    coeffs: Vector
    const: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(v) for v in self.coeffs))
        object.__setattr__(self, "const", int(self.const))
        if not any(self.coeffs):
            raise ValueError("affine constraint needs a non-zero coefficient vector")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def axis(self) -> int | None:
        """Index of the only non-zero coefficient, if there is exactly one."""
        nz = [d for d, v in enumerate(self.coeffs) if v]
        return nz[0] if len(nz) == 1 else None

    def holds(self, x: Sequence[int]) -> bool:
        return _dot(self.coeffs, x) + self.const >= 0

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return points @ np.array(self.coeffs, dtype=np.int64) + self.const >= 0

    def negate(self) -> AffineIneq:
        return AffineIneq(tuple(-v for v in self.coeffs), -self.const - 1)

    def normalized(self) -> AffineIneq:
        g = reduce(math.gcd, (abs(v) for v in self.coeffs))
        if g == 1:
            return self
        return AffineIneq(tuple(v // g for v in self.coeffs), self.const // g)


@dataclass(frozen=True)
class ResidueInterval:
    """``lo <= (form . x mod modulus) <= hi``."""

    form: Vector
    modulus: int
    lo: int
    hi: int

    def __post_init__(self):
        object.__setattr__(self, "form", tuple(int(v) for v in self.form))
        if self.modulus < 2:
            raise ValueError(f"modulus must be at least 2, got {self.modulus}")
        if not 0 <= self.lo <= self.hi < self.modulus:
            raise ValueError(
                f"residue bounds [{self.lo}, {self.hi}] outside [0, {self.modulus})"
            )

    @classmethod
    def from_negative(cls, form: Sequence[int], modulus: int, lo: int, hi: int) -> ResidueInterval:
        """Build from bounds on the representative in ``[-modulus, 0)``."""
        if not -modulus <= lo <= hi < 0:
            raise ValueError(f"negative residue bounds [{lo}, {hi}] outside [-{modulus}, 0)")
        return cls(tuple(form), modulus, lo + modulus, hi + modulus)

    @property
    def dim(self) -> int:
        return len(self.form)

    @property
    def is_full(self) -> bool:
        return self.lo == 0 and self.hi == self.modulus - 1

    def holds(self, x: Sequence[int]) -> bool:
        return self.lo <= _dot(self.form, x) % self.modulus <= self.hi

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        r = np.mod(points @ np.array(self.form, dtype=np.int64), self.modulus)
        return (r >= self.lo) & (r <= self.hi)

    def complement(self) -> list[ResidueInterval]:
        out = []
        if self.lo > 0:
            out.append(ResidueInterval(self.form, self.modulus, 0, self.lo - 1))
        if self.hi < self.modulus - 1:
            out.append(ResidueInterval(self.form, self.modulus, self.hi + 1, self.modulus - 1))
        return out

    def periods(self) -> list[int]:
        """Per-dimension shift lengths leaving the constraint invariant."""
        return [self.modulus // math.gcd(v, self.modulus) for v in self.form]


Atom = Union[AffineIneq, ResidueInterval]


def _atom_key(atom: Atom):
    if isinstance(atom, ResidueInterval):
        return (0, tuple(-v for v in atom.form), atom.modulus, atom.lo, atom.hi)
    return (1, tuple(-v for v in atom.coeffs), atom.const)


@dataclass(frozen=True)
class Conjunct:
    """Conjunction of atoms; build through :meth:`of` to get merging."""

    atoms: tuple[Atom, ...] = ()

    @classmethod
    def of(cls, atoms: Iterable[Atom]) -> Conjunct | None:
        """Merge atoms into a conjunct, or return ``None`` if trivially empty.

        Residue intervals on the same ``(form, modulus)`` are intersected and
        affine constraints with the same (gcd-normalised) coefficients keep the
        tightest constant.  Opposite affine pairs are checked for conflict.
        """
        residues: dict[tuple, tuple[int, int]] = {}
        affine: dict[Vector, int] = {}
        for atom in atoms:
            if isinstance(atom, ResidueInterval):
                key = (atom.form, atom.modulus)
                lo, hi = residues.get(key, (0, atom.modulus - 1))
                lo, hi = max(lo, atom.lo), min(hi, atom.hi)
                if lo > hi:
                    return None
                residues[key] = (lo, hi)
            else:
                atom = atom.normalized()
                affine[atom.coeffs] = min(affine.get(atom.coeffs, atom.const), atom.const)
        for coeffs, const in affine.items():
            opposite = tuple(-v for v in coeffs)
            if opposite in affine and const + affine[opposite] < 0:
                return None
        merged: list[Atom] = [
            ResidueInterval(form, s, lo, hi)
            for (form, s), (lo, hi) in residues.items()
            if not (lo == 0 and hi == s - 1)
        ]
        merged.extend(AffineIneq(c, k) for c, k in affine.items())
        return cls(tuple(sorted(merged, key=_atom_key)))

    def holds(self, x: Sequence[int]) -> bool:
        return all(a.holds(x) for a in self.atoms)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        mask = np.ones(len(points), dtype=bool)
        for a in self.atoms:
            mask &= a.evaluate(points)
        return mask

    def implies(self, other: Conjunct) -> bool:
        """Syntactic test that ``self`` is a subset of ``other``."""
        mine_res = {(a.form, a.modulus): a for a in self.atoms if isinstance(a, ResidueInterval)}
        mine_aff = {a.coeffs: a.const for a in self.atoms if isinstance(a, AffineIneq)}
        for a in other.atoms:
            if isinstance(a, ResidueInterval):
                b = mine_res.get((a.form, a.modulus))
                if b is None or b.lo < a.lo or b.hi > a.hi:
                    return False
            else:
                c = mine_aff.get(a.coeffs)
                if c is None or c > a.const:
                    return False
        return True

    def without(self, index: int) -> Conjunct:
        return Conjunct(self.atoms[:index] + self.atoms[index + 1:])


def _reduce(disjuncts: Iterable[Conjunct]) -> tuple[Conjunct, ...]:
    unique = list(dict.fromkeys(disjuncts))
    if len(unique) > _ABSORB_LIMIT:
        return tuple(unique)
    # Conjuncts are merged per constraint key, so mutual implication means equality.
    kept = [
        c for i, c in enumerate(unique)
        if not any(j != i and c.implies(d) for j, d in enumerate(unique))
    ]
    return tuple(kept)


@dataclass(frozen=True)
class QSet:
    dim: int
    disjuncts: tuple[Conjunct, ...] = ()

    @classmethod
    def empty(cls, dim: int) -> QSet:
        return cls(dim, ())

    @classmethod
    def universe(cls, dim: int) -> QSet:
        return cls(dim, (Conjunct(),))

    @classmethod
    def from_atoms(cls, dim: int, atoms: Iterable[Atom]) -> QSet:
        atoms = list(atoms)
        for a in atoms:
            if a.dim != dim:
                raise ValueError(f"atom of dimension {a.dim} in a set of dimension {dim}")
        conj = Conjunct.of(atoms)
        return cls(dim, () if conj is None else (conj,))

    @classmethod
    def residue(cls, form: Sequence[int], modulus: int, lo: int, hi: int) -> QSet:
        """``lo <= f.x mod s <= hi``; out-of-order bounds give the empty set."""
        dim = len(form)
        if lo > hi:
            return cls.empty(dim)
        if modulus == 1 or (lo <= 0 and hi >= modulus - 1):
            return cls.universe(dim)
        return cls.from_atoms(dim, [ResidueInterval(tuple(form), modulus, max(lo, 0), min(hi, modulus - 1))])

    @classmethod
    def box(cls, lower: Sequence[int], upper: Sequence[int]) -> QSet:
        dim = len(lower)
        atoms = []
        for d, (lo, hi) in enumerate(zip(lower, upper)):
            unit = [0] * dim
            unit[d] = 1
            atoms.append(AffineIneq(tuple(unit), -lo))
            atoms.append(AffineIneq(tuple(-v for v in unit), hi))
        return cls.from_atoms(dim, atoms)

    def __len__(self) -> int:
        return len(self.disjuncts)

    def atoms(self) -> Iterator[Atom]:
        for c in self.disjuncts:
            yield from c.atoms

    def member(self, x: Sequence[int]) -> bool:
        return any(c.holds(x) for c in self.disjuncts)

    __contains__ = member

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Vectorised membership for an ``(n, dim)`` integer array."""
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        mask = np.zeros(len(points), dtype=bool)
        for c in self.disjuncts:
            mask |= c.evaluate(points)
        return mask

    def _check(self, other: QSet):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def intersect(self, other: QSet) -> QSet:
        self._check(other)
        if len(self.disjuncts) * len(other.disjuncts) > MAX_DISJUNCTS:
            raise SetTooComplex(
                f"intersection would create {len(self.disjuncts) * len(other.disjuncts)} disjuncts"
            )
        out = []
        for a in self.disjuncts:
            for b in other.disjuncts:
                c = Conjunct.of(a.atoms + b.atoms)
                if c is not None:
                    out.append(c)
        return QSet(self.dim, _reduce(out))

    def union(self, other: QSet) -> QSet:
        self._check(other)
        out = _reduce(self.disjuncts + other.disjuncts)
        if len(out) > MAX_DISJUNCTS:
            raise SetTooComplex(f"union has {len(out)} disjuncts")
        return QSet(self.dim, out)

    def complement(self) -> QSet:
        result = QSet.universe(self.dim)
        for conj in self.disjuncts:
            negated = QSet.empty(self.dim)
            for atom in conj.atoms:
                negated = negated | complement_atom(atom, self.dim)
            result = result & negated
        return result

    def subtract(self, other: QSet) -> QSet:
        return self & other.complement()

    __and__ = intersect
    __or__ = union
    __sub__ = subtract

    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{d}" for d in range(self.dim)]
        if not self.disjuncts:
            return "false"
        parts = [conjunct_text(c, names) for c in self.disjuncts]
        if len(parts) == 1:
            return parts[0]
        return " ∨ ".join(p if len(c.atoms) <= 1 else f"({p})" for p, c in zip(parts, self.disjuncts))

    def __str__(self) -> str:
        return self.to_text()


def complement_atom(atom: Atom, dim: int) -> QSet:
    """Complement of a single atom as a set of at most two disjuncts."""
    if isinstance(atom, AffineIneq):
        return QSet.from_atoms(dim, [atom.negate()])
    return QSet(dim, tuple(Conjunct((a,)) for a in atom.complement()))


def union_all(dim: int, sets: Iterable[QSet]) -> QSet:
    return reduce(QSet.union, sets, QSet.empty(dim))


def intersect_all(dim: int, sets: Iterable[QSet]) -> QSet:
    return reduce(QSet.intersect, sets, QSet.universe(dim))


# --- emptiness ---------------------------------------------------------------


def conjunct_periods(conj: Conjunct, dim: int) -> list[int]:
    periods = [1] * dim
    for atom in conj.atoms:
        if isinstance(atom, ResidueInterval):
            periods = [math.lcm(p, q) for p, q in zip(periods, atom.periods())]
    return periods


def set_periods(qset: QSet) -> list[int]:
    periods = [1] * qset.dim
    for conj in qset.disjuncts:
        periods = [math.lcm(p, q) for p, q in zip(periods, conjunct_periods(conj, qset.dim))]
    return periods


def conjunct_window(conj: Conjunct, dim: int):
    """Box whose points decide emptiness of ``conj``, or ``None`` if empty.

    With only axis-aligned affine atoms each dimension is independent: any
    solution can be shifted by whole periods into a window one period wide.
    General affine atoms need the whole (bounded) polyhedron.
    """
    periods = conjunct_periods(conj, dim)
    affine = [a for a in conj.atoms if isinstance(a, AffineIneq)]
    lower: list[int | None] = [None] * dim
    upper: list[int | None] = [None] * dim
    general = []
    for a in affine:
        d = a.axis
        if d is None:
            general.append(a)
            continue
        coef = a.coeffs[d]
        if coef > 0:
            bound = -(a.const // coef)
            lower[d] = bound if lower[d] is None else max(lower[d], bound)
        else:
            bound = a.const // -coef
            upper[d] = bound if upper[d] is None else min(upper[d], bound)
    if general:
        A = np.array([[-v for v in a.coeffs] for a in general], dtype=float)
        b = np.array([a.const for a in general], dtype=float)
        box = lattice.lp_bounding_box(A, b, list(zip(lower, upper)))
        if box is None:
            return None
        lo, hi = box
        if any(v is None for v in lo + hi):
            raise UnsupportedSet("general affine constraints over an unbounded region")
        return lo, hi
    win_lo, win_hi = [], []
    for d in range(dim):
        lo, hi, p = lower[d], upper[d], periods[d]
        if lo is not None and hi is not None and lo > hi:
            return None
        if lo is not None:
            win_lo.append(lo)
            win_hi.append(lo + p - 1 if hi is None else min(hi, lo + p - 1))
        elif hi is not None:
            win_lo.append(hi - p + 1)
            win_hi.append(hi)
        else:
            win_lo.append(0)
            win_hi.append(p - 1)
    return win_lo, win_hi


def is_empty(qset: QSet, spec: ProblemSpec | None = None,
             budget: int = lattice.DEFAULT_POINT_BUDGET) -> bool:
    """Exact emptiness test by enumeration of one period box per disjunct.

    When ``spec`` has a bounded domain the set is first clipped to it.
    Raises :class:`~tilemars.errors.BoxTooLarge` past ``budget`` points.
    """
    if spec is not None and spec.domain is not None:
        qset = qset & QSet.box(spec.domain.lower, spec.domain.upper)
    for conj in qset.disjuncts:
        window = conjunct_window(conj, qset.dim)
        if window is None:
            continue
        pts = lattice.box_points(*window, budget=budget)
        if len(pts) and conj.evaluate(pts).any():
            return False
    return True


# --- batched evaluation over a fixed grid -------------------------------------


def _to_bits(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


class PointGrid:
    """Caches atom masks over a fixed point array as Python-int bitsets.

    The grid must be *exact* for the sets evaluated on it: two sets built
    from the same atoms are equal iff their masks are equal.  A full period
    box is exact for residue-only sets; see
    :func:`tilemars.algorithms.evaluation_grid` for bounded domains.
    """

    def __init__(self, points: np.ndarray):
        self.points = np.asarray(points, dtype=np.int64)
        self.size = len(self.points)
        self.full = (1 << self.size) - 1
        self._atoms: dict[Atom, int] = {}

    def atom_mask(self, atom: Atom) -> int:
        bits = self._atoms.get(atom)
        if bits is None:
            bits = self._atoms[atom] = _to_bits(atom.evaluate(self.points))
        return bits

    def conjunct_mask(self, conj: Conjunct) -> int:
        bits = self.full
        for a in conj.atoms:
            bits &= self.atom_mask(a)
            if not bits:
                break
        return bits

    def mask(self, qset: QSet) -> int:
        bits = 0
        for c in qset.disjuncts:
            bits |= self.conjunct_mask(c)
        return bits

    def is_empty(self, qset: QSet) -> bool:
        return not any(self.conjunct_mask(c) for c in qset.disjuncts)

    def prune(self, qset: QSet) -> QSet:
        """Drop disjuncts that are empty on the grid."""
        return QSet(qset.dim, tuple(c for c in qset.disjuncts if self.conjunct_mask(c)))

    def simplify(self, qset: QSet) -> QSet:
        """Shorter equivalent form: drop redundant residue atoms and disjuncts.

        Affine atoms are kept so the result never leaves the region covered
        by the grid.
        """
        target = self.mask(qset)
        conjs = [c for c in dict.fromkeys(qset.disjuncts) if self.conjunct_mask(c)]
        widened = []
        for conj in conjs:
            i = 0
            while i < len(conj.atoms):
                if isinstance(conj.atoms[i], ResidueInterval):
                    loose = conj.without(i)
                    m = self.conjunct_mask(loose)
                    if m & ~target == 0:
                        conj = loose
                        continue
                i += 1
            widened.append(conj)
        widened = list(dict.fromkeys(widened))
        masks = [self.conjunct_mask(c) for c in widened]
        order = sorted(range(len(widened)), key=lambda i: (bin(masks[i]).count("1"), -i))
        alive = set(range(len(widened)))
        for i in order:
            rest = 0
            for j in alive:
                if j != i:
                    rest |= masks[j]
            if masks[i] & ~rest == 0:
                alive.discard(i)
        kept = tuple(c for i, c in enumerate(widened) if i in alive)
        return QSet(qset.dim, kept)


# --- text rendering -------------------------------------------------------------


def form_text(form: Sequence[int], names: Sequence[str]) -> str:
    out = ""
    for coef, name in zip(form, names):
        if coef == 0:
            continue
        mag = "" if abs(coef) == 1 else str(abs(coef))
        if not out:
            out = ("-" if coef < 0 else "") + mag + name
        else:
            out += (" - " if coef < 0 else " + ") + mag + name
    return out or "0"


def atom_text(atom: Atom, names: Sequence[str]) -> str:
    if isinstance(atom, AffineIneq):
        d = atom.axis
        if d is not None and abs(atom.coeffs[d]) == 1:
            if atom.coeffs[d] > 0:
                return f"{names[d]} ≥ {-atom.const}"
            return f"{names[d]} ≤ {atom.const}"
        return f"{form_text(atom.coeffs, names)} ≥ {-atom.const}"
    f = form_text(atom.form, names)
    s = atom.modulus
    if atom.lo == atom.hi:
        return f"{f} ≡ {atom.lo} [{s}]"
    if atom.hi - atom.lo == s - 2:
        missing = atom.lo - 1 if atom.lo > 0 else s - 1
        return f"¬({f} ≡ {missing} [{s}])"
    operand = f if sum(1 for v in atom.form if v) == 1 else f"({f})"
    return f"{atom.lo} ≤ {operand} mod {s} ≤ {atom.hi}"


def conjunct_text(conj: Conjunct, names: Sequence[str]) -> str:
    if not conj.atoms:
        return "true"
    return " ∧ ".join(atom_text(a, names) for a in conj.atoms)
