import numpy as np
import pytest

from tilemars import benchmarks, lattice, oracle
from tilemars.algorithms import (
    crossing_set,
    evaluation_grid,
    exact_crossing_set,
    flow_in,
    flow_out,
    mars_partition,
    realizable_consumers,
    restrict_to_tile,
    tile_volume,
)
from tilemars.errors import CandidateExplosion, EmptyTile, IllegalTiling

import properties
from conftest import make_spec

PERIOD8 = lattice.box_points((0, 0), (7, 7))


def _pts(mask):
    return {tuple(p) for p in PERIOD8[mask].tolist()}


def test_crossing_set_square(sw_square):
    s = crossing_set(0, (1, 0), sw_square)
    assert _pts(s.contains(PERIOD8)) == {(i, j) for i in (3, 7) for j in range(8)}
    assert crossing_set(1, (1, 0), sw_square).disjuncts == ()


def test_crossing_set_jacobi_1d_thickness_two():
    spec = benchmarks.load("jacobi-1d")
    s = crossing_set(0, (1, 1), spec)
    got = s.contains(PERIOD8)
    expected = np.isin((PERIOD8[:, 0] + PERIOD8[:, 1]) % 4, [2, 3])
    assert (got == expected).all()
    assert s.to_text(spec.iterator_names) == "2 ≤ (t + i) mod 4 ≤ 3"


def test_crossing_set_matches_oracle(bench_spec):
    grid = evaluation_grid(bench_spec).points
    for k in range(bench_spec.n_hyperplanes):
        for b in bench_spec.dependences:
            got = crossing_set(k, b, bench_spec).contains(grid)
            want = [oracle.crosses(tuple(x), b, k, bench_spec) for x in grid.tolist()]
            assert got.tolist() == want


def test_flow_out_square(sw_square):
    fo = flow_out(sw_square)
    names = sw_square.iterator_names
    got = fo.whole.contains(PERIOD8)
    want = (PERIOD8[:, 0] % 4 == 3) | (PERIOD8[:, 1] % 4 == 3)
    assert (got == want).all()
    assert set(fo.whole.to_text(names).split(" ∨ ")) == {"i ≡ 3 [4]", "j ≡ 3 [4]"}
    assert tile_volume(fo.whole, sw_square, (2, 2)) == 7


def test_flow_in_square(sw_square):
    fi = flow_in(sw_square)
    got = fi.whole.contains(PERIOD8)
    want = (PERIOD8[:, 0] % 4 == 0) | (PERIOD8[:, 1] % 4 == 0)
    assert (got == want).all()
    producers = set()
    pts = lattice.tile_points(sw_square, (1, 1))
    for (k, j), part in fi.per_dependence.items():
        b = np.array(sw_square.dependences[j])
        producers |= {tuple(p) for p in (pts[part.contains(pts)] - b).tolist()}
    assert producers == oracle.oracle_flow_in(sw_square, (1, 1))
    assert len(producers) == 9


def test_flow_sets_match_oracle(bench_spec):
    tile = lattice.sample_tile(bench_spec)
    pts = lattice.tile_points(bench_spec, tile)
    fo = {tuple(p) for p in pts[flow_out(bench_spec).whole.contains(pts)].tolist()}
    fi = {tuple(p) for p in pts[flow_in(bench_spec).whole.contains(pts)].tolist()}
    assert fo == oracle.oracle_flow_out(bench_spec, tile)
    assert fi == oracle.oracle_readers(bench_spec, tile)


def test_bounded_domain_flow_out():
    spec = make_spec("box", [[1, 0], [0, 1], [1, 1]], [[1, 0], [0, 1]], 4, domain=([0, 0], [15, 15]))
    fo = flow_out(spec).whole
    for tile in [(0, 0), (1, 2), (3, 3), (3, 0)]:
        pts = lattice.tile_points(spec, tile)
        got = {tuple(p) for p in pts[fo.contains(pts)].tolist()}
        assert got == oracle.oracle_flow_out(spec, tile)
    # (16, *) is outside the domain, so the right column no longer sends along i
    assert not fo.member((15, 2))
    assert fo.member((15, 3))
    assert fo.member((11, 2))


def test_bounded_domain_partition_matches_oracle():
    spec = make_spec("box", [[1, 0], [0, 1], [1, 1]], [[1, 1], [0, 1]], 4, domain=([0, 0], [20, 13]))
    partition = mars_partition(spec)
    for t0 in range(0, 9):
        for t1 in range(0, 4):
            try:
                truth = oracle.oracle_mars(spec, (t0, t1))
            except EmptyTile:
                continue
            got = {sig: {tuple(p) for p in pts.tolist()}
                   for sig, pts in restrict_to_tile(partition, (t0, t1)).items() if len(pts)}
            assert got == {sig: set(p) for sig, p in truth.items()}, (t0, t1)


@pytest.mark.parametrize("name, count", [
    ("sw", 3), ("sw-square", 3), ("jacobi-1d", 3), ("gemm", 1), ("canonical-3d", 3),
    ("seidel-2d", 7), ("jacobi-2d-r", 7), ("jacobi-2d-d", 15),
])
def test_realizable_consumers(name, count):
    assert len(realizable_consumers(benchmarks.load(name))) == count


def test_gemm_consumer():
    assert realizable_consumers(benchmarks.load("gemm")) == ((0, 1, 0),)


def test_exact_crossing_set_diagonal(sw_square):
    corner = exact_crossing_set(sw_square, (1, 1), (1, 1))
    assert _pts(corner.contains(PERIOD8)) == {(3, 3), (3, 7), (7, 3), (7, 7)}
    assert not exact_crossing_set(sw_square, (0, 1), (1, 0)).contains(PERIOD8).any()


def test_sw_square_partition(sw_square):
    partition = mars_partition(sw_square)
    names = sw_square.iterator_names
    forms = {m.signature: m.set.to_text(names) for m in partition}
    assert forms == {
        ((0, 1),): "¬(i ≡ 3 [4]) ∧ j ≡ 3 [4]",
        ((1, 0),): "i ≡ 3 [4] ∧ ¬(j ≡ 3 [4])",
        ((0, 1), (1, 0), (1, 1)): "i ≡ 3 [4] ∧ j ≡ 3 [4]",
    }


@pytest.mark.parametrize("name, n", [
    ("sw", 4), ("jacobi-1d", 4), ("canonical-3d", 7), ("gemm", 1),
    ("seidel-2d", 13), ("jacobi-2d-r", 13), ("jacobi-2d-d", 34),
])
def test_mars_counts(name, n):
    assert len(mars_partition(benchmarks.load(name))) == n


def test_exhaustive_agrees_with_pruned(bench_spec):
    a = mars_partition(bench_spec)
    b = mars_partition(bench_spec, exhaustive=True)
    assert [m.signature for m in a] == [m.signature for m in b]
    grid = evaluation_grid(bench_spec).points
    for x, y in zip(a, b):
        assert (x.set.contains(grid) == y.set.contains(grid)).all()
    assert b.candidates == 2 ** (2 ** bench_spec.n_hyperplanes - 1) - 1


def test_candidate_budget():
    with pytest.raises(CandidateExplosion):
        mars_partition(benchmarks.load("jacobi-2d-d"), exhaustive=True, candidate_budget=1000)


def test_illegal_spec_rejected():
    spec = make_spec("bad", [[1, -1]], [[1, 0], [0, 1]], 4)
    with pytest.raises(IllegalTiling):
        flow_out(spec)


def test_signature_soundness(bench_spec):
    partition = mars_partition(bench_spec)
    tile = lattice.sample_tile(bench_spec)
    for sig, pts in restrict_to_tile(partition, tile).items():
        for x in pts.tolist():
            assert oracle.consumer_signature(tuple(x), bench_spec) == sig


@pytest.mark.parametrize("check", sorted(properties.ALL_CHECKS))
def test_partition_properties(bench_spec, check):
    ok, detail = properties.ALL_CHECKS[check](bench_spec)
    assert ok, detail


def test_volume_duality(bench_spec):
    ok, detail = properties.volume_duality(bench_spec)
    assert ok, detail
