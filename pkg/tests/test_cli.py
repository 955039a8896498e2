import json
import xml.etree.ElementTree as ET

import pytest
from click.testing import CliRunner

from tilemars import benchmarks
from tilemars.cli import main
from tilemars.specfile import dumps_spec, load_spec


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(main, list(args))


def test_validate_ok(runner):
    res = run(runner, "validate", "--spec", "sw")
    assert res.exit_code == 0
    assert res.output.startswith("OK: sw")


def test_validate_file(runner, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(dumps_spec(benchmarks.load("jacobi-1d")))
    res = run(runner, "validate", "--spec", str(path), "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.output)["crossing_matrix"] == [[0, 1, 2], [2, 1, 0]]
    assert load_spec(path) == benchmarks.load("jacobi-1d")


def test_validate_illegal(runner, tmp_path):
    path = tmp_path / "bad.json"
    spec = benchmarks.load("sw-square").with_tile_sizes(4)
    text = dumps_spec(spec).replace("[1, 1]]", "[1, -1]]")
    path.write_text(text)
    res = run(runner, "validate", "--spec", str(path))
    assert res.exit_code == 1
    assert "IllegalTiling" in res.output


def test_parse_error_exit(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"name": "x", "dim": 2}')
    res = run(runner, "validate", "--spec", str(path))
    assert res.exit_code == 1
    assert "SpecParseError: dependences" in res.output


def test_missing_spec(runner):
    assert run(runner, "mars", "--spec", "nope").exit_code == 1
    assert run(runner, "mars").exit_code != 0


def test_flow_out(runner):
    res = run(runner, "flow-out", "--spec", "sw-square", "--oracle-check")
    assert res.exit_code == 0
    assert "points per tile (sample tile (2, 2)): 7" in res.output


def test_flow_in_json(runner):
    res = run(runner, "flow-in", "--spec", "sw-square", "--format", "json", "--oracle-check")
    data = json.loads(res.output)
    assert data["points_per_tile"] == 7
    assert len(data["per_dependence"]) == 4


def test_mars_json(runner):
    res = run(runner, "mars", "--spec", "sw-square", "--format", "json", "--oracle-check")
    assert res.exit_code == 0
    rows = json.loads(res.output)["mars"]
    assert [r["points_per_tile"] for r in rows] == [3, 3, 1]
    assert rows[2]["closed_form"] == "i ≡ 3 [4] ∧ j ≡ 3 [4]"


def test_mars_exhaustive_table(runner):
    res = run(runner, "mars", "--spec", "jacobi-2d-d", "--exhaustive")
    assert res.exit_code == 0
    assert res.output.startswith("34 MARS for jacobi-2d-d")


def test_stats(runner):
    res = run(runner, "stats", "--spec", "sw", "--tile-sizes", "8", "--format", "json")
    data = json.loads(res.output)
    assert (data["consumer_tiles"], data["mars_nonempty"], data["singletons"]) == (3, 4, 2)
    assert data["tile_sizes"] == [8, 8]


def test_bad_tile_sizes(runner):
    res = run(runner, "stats", "--spec", "sw", "--tile-sizes", "a,b")
    assert res.exit_code == 2


def test_render_svg(runner, tmp_path):
    out = tmp_path / "sw.svg"
    res = run(runner, "render", "--spec", "sw-square", "--start", "1,1", "--out", str(out))
    assert res.exit_code == 0
    root = ET.parse(out).getroot()
    assert root.tag.endswith("svg")


def test_render_3d(runner):
    res = run(runner, "render", "--spec", "gemm")
    assert json.loads(res.output)["groups"][0]["signature"] == [[0, 1, 0]]


def test_bench_single(runner):
    res = run(runner, "bench", "--spec", "sw", "--format", "json")
    assert json.loads(res.output)[0]["mars_nonempty"] == 4


def test_bench_table(runner):
    res = run(runner, "bench")
    assert res.exit_code == 0
    assert "34 (26)" in res.output
