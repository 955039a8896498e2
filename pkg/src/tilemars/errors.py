"""Exception hierarchy shared by every tilemars module."""


class MarsError(Exception):
    """Base class for all errors raised by tilemars."""


class SpecError(MarsError, ValueError):
    """The problem description is malformed or violates a modelling hypothesis."""


class SpecParseError(SpecError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class IllegalTiling(SpecError):
    """A dependence crosses a hyperplane family backwards (negative scalar product)."""


class LongDependence(SpecError):
    """A dependence may jump over a whole tile along one hyperplane family."""


class EmptyDomain(SpecError):
    """A bounded domain does not contain a single full tile."""


class UnboundedTile(SpecError):
    """The hyperplane normals do not span the iteration space."""


class EmptyTile(MarsError):
    """The requested tile holds no point of the domain."""


class BoxTooLarge(MarsError):
    """An enumeration box exceeds the configured point budget."""


class SetTooComplex(MarsError):
    """A disjunctive normal form grew past the configured disjunct cap."""


class UnsupportedSet(MarsError):
    """The set mixes general affine constraints with unbounded dimensions."""


class CandidateExplosion(MarsError):
    """Too many candidate consumer signatures to enumerate."""


class OracleMismatch(MarsError):
    """The symbolic result disagrees with brute-force enumeration."""


class DimensionUnsupported(MarsError):
    """The renderer does not handle this iteration-space dimension."""
