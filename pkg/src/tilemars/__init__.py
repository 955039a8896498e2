"""Tile-wise flow-out/flow-in sets and their partition into Maximal Atomic
irRedundant Sets (MARS) for uniform-dependence loop nests."""

from .algorithms import (
    FlowResult,
    Mars,
    MarsPartition,
    crossing_set,
    flow_in,
    flow_out,
    mars_partition,
    realizable_consumers,
    restrict_to_tile,
)
from .errors import MarsError
from .model import DomainBox, Hyperplane, ProblemSpec, nontrivial_parts, validate
from .qset import QSet

__version__ = "0.1.0"

__all__ = [
    "DomainBox",
    "FlowResult",
    "Hyperplane",
    "Mars",
    "MarsError",
    "MarsPartition",
    "ProblemSpec",
    "QSet",
    "crossing_set",
    "flow_in",
    "flow_out",
    "mars_partition",
    "nontrivial_parts",
    "realizable_consumers",
    "restrict_to_tile",
    "validate",
]
