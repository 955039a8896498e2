import pytest

from tilemars import benchmarks
from tilemars.algorithms import mars_partition
from tilemars.errors import LongDependence, OracleMismatch
from tilemars.report import (
    affine_rank,
    analyze,
    check_against_oracle,
    format_report,
    format_table,
    stability_check,
)
from tilemars.algorithms import Mars, MarsPartition
from tilemars.qset import QSet

from conftest import make_spec


def test_analyze_sw_square(sw_square):
    r = analyze(sw_square)
    assert r.summary_row == (3, 3, 1)
    assert r.flow_out_volume_per_tile == 7
    assert r.reader_volume_per_tile == 7
    assert r.flow_in_volume_per_tile == 9
    assert r.naive_overlap_volume == 9
    dims = {m.signature: m.dimensionality for m in r.mars}
    assert dims[((0, 1), (1, 0), (1, 1))] == 0
    assert dims[((1, 0),)] == 1


def test_analyze_jacobi_2d_d():
    r = analyze(benchmarks.load("jacobi-2d-d"))
    assert (r.consumer_tiles, r.mars_raw, r.mars_nonempty, r.singletons) == (15, 34, 26, 6)
    assert len(r.empty_in_tile) == 8


def test_to_dict_key_order(sw):
    d = analyze(sw).to_dict()
    assert list(d)[:6] == ["name", "consumer_tiles", "mars_raw", "mars_nonempty", "singletons", "mars"]
    assert "seconds" not in d


def test_tile_size_override(sw):
    r = analyze(sw, 8)
    assert r.tile_sizes == [8, 8]
    assert r.summary_row == (3, 4, 2)


def test_long_dependence_in_analyze(sw):
    with pytest.raises(LongDependence):
        analyze(make_spec("long", [[3, 0]], [[1, 0], [0, 1]], 2))


def test_stability_sw_square(sw_square):
    assert stability_check(sw_square, [4, 8, 16])


@pytest.mark.slow
def test_stability_seidel():
    assert stability_check(benchmarks.load("seidel-2d"), [8, 16])


def test_affine_rank():
    assert affine_rank([(1, 1)]) == 0
    assert affine_rank([(0, 3), (1, 3), (2, 3)]) == 1
    assert affine_rank([(0, 0, 0), (1, 0, 0), (0, 1, 0)]) == 2


def test_oracle_mismatch_detected(sw_square):
    good = mars_partition(sw_square)
    # swap two closed forms so points land under the wrong signature
    a, b = good.mars[0], good.mars[1]
    bad = MarsPartition(sw_square, (Mars(a.signature, b.set), Mars(b.signature, a.set)) + good.mars[2:],
                        good.consumers, good.candidates, good.exhaustive)
    with pytest.raises(OracleMismatch):
        check_against_oracle(bad, (2, 2))
    short = MarsPartition(sw_square, good.mars[:2] + (Mars(good.mars[2].signature, QSet.empty(2)),),
                          good.consumers, good.candidates, good.exhaustive)
    with pytest.raises(OracleMismatch):
        check_against_oracle(short, (2, 2))


def test_format_table_and_report(sw):
    r = analyze(sw)
    table = format_table([r, analyze(benchmarks.load("jacobi-2d-d"))])
    lines = table.splitlines()
    assert lines[0].split()[0] == "Dims"
    assert "34 (26)" in lines[3]
    assert "sw" in lines[2]
    text = format_report(r)
    assert "consumer tiles        3" in text
