import numpy as np
import pytest

from polyharm import cli
from polyharm.cli import (
    EXIT_ASSERT,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_RESOURCE,
    ConfigError,
    emit_heatmap,
    parse_config,
    read_pgm,
)
from polyharm.field_core import GridSpec, SpatialField

MAXIMAL = """
grid.dims = 1
grid.n = 256
grid.L = 16
function.kind = gaussian_shell
audit.r = 1.0
"""


def files(path):
    return sorted(p.name for p in path.iterdir())


def test_parse_rejects_bad_input():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("grid.nn = 4")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("grid.n = 64\ngrid.n = 128")
    with pytest.raises(ConfigError, match="requires"):
        parse_config("grid.n = 64", "maximal-audit")
    with pytest.raises(ConfigError, match="0 < r < 3"):
        parse_config(MAXIMAL.replace("audit.r = 1.0", "audit.r = 3.5"), "maximal-audit")


def test_manifest_echo_round_trips(tmp_path):
    code, _ = cli.run("maximal-audit", MAXIMAL, tmp_path)
    assert code == EXIT_OK
    manifest = (tmp_path / "manifest.txt").read_text()
    assert manifest.startswith("# subcommand maximal-audit")
    assert parse_config(manifest, "maximal-audit") == parse_config(MAXIMAL, "maximal-audit")


def test_maximal_audit_outputs(tmp_path):
    code, msgs = cli.run("maximal-audit", MAXIMAL + "output.heatmap = true\n", tmp_path)
    assert code == EXIT_OK, msgs
    assert files(tmp_path) == ["manifest.txt", "maximal_audit.csv", "maximal_function.pgm"]
    img = read_pgm(tmp_path / "maximal_function.pgm")
    assert img.shape == (1, 256) and img.max() == 255 and img.min() == 0


def test_config_error_leaves_no_files(tmp_path):
    code, msgs = cli.run("maximal-audit", MAXIMAL.replace("1.0", "3.5"), tmp_path)
    assert code == EXIT_CONFIG and "0 < r < 3" in msgs[0]
    assert files(tmp_path) == []


def test_hypothesis_violation_is_config_error(tmp_path):
    code, msgs = cli.run("maximal-audit", MAXIMAL.replace("grid.L = 16", "grid.L = 12"), tmp_path)
    assert code == EXIT_CONFIG and "hypothesis" in msgs[0]
    assert files(tmp_path) == []


def test_resource_cap(tmp_path):
    code, msgs = cli.run("maximal-audit", MAXIMAL + "limits.max_points = 100\n", tmp_path)
    assert code == EXIT_RESOURCE and "limits.max_points" in msgs[0]
    assert files(tmp_path) == []


def test_failed_assertion_exit(tmp_path):
    text = MAXIMAL + "audit.name = theorem12_stability\naudit.ladder = 64:1 128:2 256:4\naudit.threshold = 0.01\n"
    code, msgs = cli.run("maximal-audit", text, tmp_path)
    assert code == EXIT_ASSERT and "stability" in msgs[0]
    # results are still written so the failure can be inspected
    assert "maximal_audit.csv" in files(tmp_path)


def test_partition_check(tmp_path):
    code, msgs = cli.run("partition-check", "partition.samples = 2000\npartition.max_J = 6", tmp_path)
    assert code == EXIT_OK, msgs
    lines = (tmp_path / "partition_check.csv").read_text().splitlines()
    assert lines[0] == "J,max_abs_residual,samples,support_ok,squeeze_ok"
    for line in lines[1:]:
        cols = line.split(",")
        assert float(cols[1]) <= 1e-12 and cols[3] == cols[4] == "1"


def test_transform_check_small(tmp_path):
    text = "transform.trials = 2\ntransform.dims = 1, 2\ntransform.sizes = 8, 32"
    code, msgs = cli.run("transform-check", text, tmp_path)
    assert code == EXIT_OK, msgs
    assert "gaussian" in (tmp_path / "transform_check.csv").read_text()


def test_seeded_runs_are_byte_identical(tmp_path):
    text = """
grid.n = 512
function.kind = random_bandlimited_masked
audit.r = 1.0
"""
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run("localization-run", text, a, seed=42)[0] == EXIT_OK
    assert cli.run("localization-run", text, b, seed=42)[0] == EXIT_OK
    assert files(a) == files(b)
    for name in files(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_main_entry_point(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(MAXIMAL)
    assert cli.main(["maximal-audit", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    assert cli.main(["maximal-audit", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


def test_heatmap_header_and_zero_field(tmp_path):
    grid = GridSpec(2, 16, 8.0)
    emit_heatmap(SpatialField.zeros(grid), tmp_path / "z.pgm")
    raw = (tmp_path / "z.pgm").read_bytes()
    assert raw.startswith(b"P5\n16 16\n255\n")
    assert not read_pgm(tmp_path / "z.pgm").any()


def test_heatmap_stripes(tmp_path):
    grid = GridSpec(2, 64, 8.0)
    x = grid.coords()[0]
    f = SpatialField(grid, np.broadcast_to(np.cos(2 * np.pi * 4 * x / grid.L), grid.shape))
    lo, hi = emit_heatmap(f, tmp_path / "s.pgm", component="real")
    assert lo == pytest.approx(-1) and hi == pytest.approx(1)
    column = read_pgm(tmp_path / "s.pgm")[:, 0] > 127
    runs = np.count_nonzero(np.diff(column.astype(int)) == 1) + int(column[0])
    assert runs in (4, 5)  # a bright stripe may wrap across the edge
    assert np.all(read_pgm(tmp_path / "s.pgm") == read_pgm(tmp_path / "s.pgm")[:, :1])
