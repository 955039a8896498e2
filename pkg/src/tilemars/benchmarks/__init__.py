"""Bundled problem files: the seven uniform-dependence benchmarks and a
square-tiled Smith-Waterman example."""

from __future__ import annotations

from importlib import resources

from ..model import ProblemSpec
from ..specfile import loads_spec

CORE = ("sw", "jacobi-1d", "canonical-3d", "gemm", "seidel-2d", "jacobi-2d-r", "jacobi-2d-d")
EXTRA = ("sw-square",)
ALL = CORE + EXTRA


def load(name: str) -> ProblemSpec:
    if name not in ALL:
        raise KeyError(f"unknown benchmark {name!r}; choose from {', '.join(ALL)}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text()
    return loads_spec(text)


def load_all(names=ALL) -> list[ProblemSpec]:
    return [load(n) for n in names]
