"""
Tests for the command-line front end: exit codes, output files and determinism.
"""

import json

import pandas as pd
import pytest

from src.cli import main
from src.constants import REGULARIZE_COLUMNS, REPORT_COLUMNS, SCHEMA_VERSION, TRACE_COLUMNS

FAST = ["--grid", "16x16", "--t-min", "-22", "--t-step", "1"]


# ============================================================================
# Usage Errors
# ============================================================================

def test_unknown_function_is_a_usage_error(tmp_path, capsys):
    code = main(["analyze", "no-such-member", "--out", str(tmp_path)])
    assert code == 2
    assert "unknown function" in capsys.readouterr().err


@pytest.mark.parametrize("flags", [
    ["--grid", "4x4"],
    ["--grid", "sixteen"],
    ["--t-min", "-5"],
    ["--t-step", "0"],
    ["--t-max", "1"],
    ["--tol", "-1"],
    ["--a-max", "10"],
])
def test_invalid_flags(flags, tmp_path):
    assert main(["analyze", "log-norm", "--out", str(tmp_path)] + flags) == 2


def test_missing_subcommand():
    assert main([]) == 2


def test_bad_sweep_range(tmp_path):
    assert main(["sweep", "--param-range", "demailly:5..1", "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--param-range", "demailly:1.5,2", "--out", str(tmp_path)]) == 2


# ============================================================================
# analyze
# ============================================================================

def test_analyze_writes_trace_and_report(tmp_path):
    assert main(["analyze", "log-norm", "--out", str(tmp_path)] + FAST) == 0

    trace_csv = tmp_path / "log-norm_trace.csv"
    assert trace_csv.read_text(encoding="utf-8").splitlines()[0] == ",".join(TRACE_COLUMNS)
    frame = pd.read_csv(trace_csv)
    assert len(frame) == 21
    assert frame["t"].iloc[0] == -22.0
    assert frame["K"].tolist() == pytest.approx([3.14159265359] * 21, rel=1e-10)

    doc = json.loads((tmp_path / "log-norm_report.json").read_text(encoding="utf-8"))
    assert doc["schema"] == SCHEMA_VERSION
    assert doc["config"]["n_theta"] == 16
    (report,) = doc["reports"]
    assert report["name"] == "log-norm"


def test_analyze_json_and_plot(tmp_path):
    code = main(["analyze", "radial-a2", "--format", "json", "--plot", "--out", str(tmp_path)] + FAST)
    assert code == 0
    doc = json.loads((tmp_path / "radial-a2_trace.json").read_text(encoding="utf-8"))
    assert doc["columns"] == list(TRACE_COLUMNS)
    assert len(doc["rows"]) == 21
    assert (tmp_path / "radial-a2_trace.html").exists()


def test_analyze_member_from_catalog_file(tmp_path):
    catalog = tmp_path / "members.txt"
    catalog.write_text("cli-radial Radial a=3\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["analyze", "cli-radial", "--catalog", str(catalog), "--out", str(out)] + FAST) == 0
    doc = json.loads((out / "cli-radial_report.json").read_text(encoding="utf-8"))
    assert doc["reports"][0]["tau"]["value"] == pytest.approx(9.0, rel=1e-8)


def test_broken_catalog_file(tmp_path, capsys):
    catalog = tmp_path / "members.txt"
    catalog.write_text("broken Radial a=1 b=2\n", encoding="utf-8")
    assert main(["analyze", "log-norm", "--catalog", str(catalog), "--out", str(tmp_path)] + FAST) == 2
    assert "line 1" in capsys.readouterr().err


# ============================================================================
# verify and sweep
# ============================================================================

def test_verify_is_deterministic(tmp_path):
    args = ["verify", "radial-a1", "demailly-m2", "--format", "json", "--out", str(tmp_path)] + FAST
    assert main(args) == 0
    first = (tmp_path / "verify.json").read_bytes()
    assert main(args) == 0
    assert (tmp_path / "verify.json").read_bytes() == first

    doc = json.loads(first)
    assert doc["columns"] == list(REPORT_COLUMNS)
    assert [row["name"] for row in doc["rows"]] == ["radial-a1", "demailly-m2"]
    assert doc["failures"] == []


@pytest.mark.slow
def test_verify_default_catalog(tmp_path):
    assert main(["verify", "--format", "json", "--out", str(tmp_path)] + FAST) == 0
    doc = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert doc["failures"] == []
    rows = {row["name"]: row for row in doc["rows"]}
    cg = rows["coman-guedj-n5"]
    assert cg["s1_invariant"] == "NotInvariant"
    assert cg["tau_method"] == "VolumeOracle"
    assert cg["tau"] == pytest.approx(1.0, rel=5e-2)
    assert not cg["verdict_upper"]
    assert rows["u1-n5"]["tau"] == pytest.approx(0.2, rel=2e-2)
    assert rows["u2-n5"]["tau"] == pytest.approx(1.0, rel=2e-2)


def test_verify_rejects_unattainable_tolerance(tmp_path, capsys):
    code = main(["verify", "radial-a1", "--tol", "1e-9", "--out", str(tmp_path)] + FAST)
    assert code == 1
    assert "tolerance" in capsys.readouterr().err


def test_sweep_radial(tmp_path):
    code = main(["sweep", "--param-range", "radial:0.5,1", "--out", str(tmp_path)] + FAST)
    assert code == 0
    frame = pd.read_csv(tmp_path / "sweep_radial.csv")
    assert frame["name"].tolist() == ["radial-a0.5", "radial-a1"]
    assert frame["tau"].tolist() == pytest.approx([0.25, 1.0], rel=1e-8)
    assert frame["parameter"].tolist() == [0.5, 1.0]


# ============================================================================
# regularize-check
# ============================================================================

@pytest.mark.slow
def test_regularize_check(tmp_path):
    code = main(["regularize-check", "log-norm", "--eps", "0.01", "--seed", "5", "--out", str(tmp_path)])
    assert code == 0
    frame = pd.read_csv(tmp_path / "log-norm_regularize.csv")
    assert list(frame.columns) == list(REGULARIZE_COLUMNS)
    assert frame["epsilon"].tolist() == [0.01]
    doc = json.loads((tmp_path / "log-norm_regularize_report.json").read_text(encoding="utf-8"))
    assert doc["reports"][0]["seed"] == 5
    assert doc["reports"][0]["passed"]
