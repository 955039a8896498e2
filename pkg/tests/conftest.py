import pytest

from tilemars import benchmarks
from tilemars.model import DomainBox, Hyperplane, ProblemSpec


def make_spec(name, deps, normals, sizes, domain=None):
    if isinstance(sizes, int):
        sizes = [sizes] * len(normals)
    hyps = tuple(Hyperplane(tuple(c), s) for c, s in zip(normals, sizes))
    box = DomainBox(*domain) if domain is not None else None
    return ProblemSpec(name, len(deps[0]), tuple(map(tuple, deps)), hyps, box)


@pytest.fixture
def sw_square():
    return benchmarks.load("sw-square")


@pytest.fixture
def sw():
    return benchmarks.load("sw")


@pytest.fixture(params=benchmarks.ALL)
def bench_spec(request):
    return benchmarks.load(request.param)
