import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "data" / "sweep_duffing_default.csv"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "oscaudit", *args],
        capture_output=True,
        text=True,
    )


def test_analyze_unit_cubic_single_shape():
    result = run_cli(
        "analyze", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-single", "--format", "json",
    )
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert payload["versions"] == {"schema": 1}
    points = payload["stationary_points"]
    assert len(points) == 1
    assert points[0]["omega"] == pytest.approx(math.sqrt(1.75), rel=1e-10)
    assert points[0]["B"] == [0.0]


def test_analyze_markdown_table_contains_frequency():
    result = run_cli(
        "analyze", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-single",
    )
    assert result.returncode == 0
    assert "1.3228756" in result.stdout
    assert "| omega | B |" in result.stdout


def test_analyze_linear_limit():
    result = run_cli(
        "analyze", "--preset", "duffing", "--A", "1", "--eps", "0",
        "--space", "al-single", "--format", "json",
    )
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert payload["stationary_points"][0]["omega"] == pytest.approx(1.0, rel=1e-12)


def test_malformed_poly_is_config_error():
    result = run_cli("analyze", "--poly", "3:1,oops", "--space", "al-single")
    assert result.returncode == 2
    assert "oops" in result.stderr


def test_unknown_space_is_config_error():
    result = run_cli("analyze", "--space", "al-triple")
    assert result.returncode == 2
    assert "al-triple" in result.stderr


def test_custom_space_requires_shapes():
    result = run_cli("analyze", "--space", "custom")
    assert result.returncode == 2


def test_audit_double_shape_reports_violations():
    result = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-double", "--format", "json",
    )
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    codes = [f["code"] for f in payload["audit"]["findings"]]
    assert "BC_VIOLATION" in codes
    assert "AMPLITUDE_MISMATCH" in codes
    assert payload["audit"]["amplitude_mismatch"] == payload["audit"]["bc"]["u1_at_0"]


def test_audit_single_shape_reports_trivial_correction():
    result = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-single", "--format", "json",
    )
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    codes = [f["code"] for f in payload["audit"]["findings"]]
    assert "TRIVIAL_CORRECTION" in codes
    assert payload["audit"]["trivial"]["flag"] is True


def test_audit_fail_on_findings_flips_exit_code():
    result = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-single", "--fail-on-findings",
    )
    assert result.returncode == 4


def test_audit_findings_are_data_by_default():
    result = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-single",
    )
    assert result.returncode == 0


def test_audit_json_round_trip_identical(tmp_path):
    out = tmp_path / "report.json"
    first = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-double", "--format", "json", "--out", str(out),
    )
    assert first.returncode == 0
    text = out.read_text(encoding="utf-8")
    payload = json.loads(text)
    assert json.loads(json.dumps(payload)) == payload
    second = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-double", "--format", "json",
    )
    assert second.stdout == text


def test_audit_markdown_sections(tmp_path):
    result = run_cli(
        "audit", "--preset", "duffing", "--A", "1", "--eps", "1",
        "--space", "al-double", "--format", "md",
    )
    assert result.returncode == 0
    assert "### BC_VIOLATION" in result.stdout
    assert "### AMPLITUDE_MISMATCH" in result.stdout
    assert "## Frequency table" in result.stdout


def test_sweep_shape_and_columns(tmp_path):
    out = tmp_path / "grid.csv"
    result = run_cli(
        "sweep", "--preset", "duffing", "--space", "al-single",
        "--eps-grid", "0,1", "--A-grid", "1", "--out", str(out),
    )
    assert result.returncode == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == (
        "eps,amplitude,omega_solver,omega_closed_single,omega_closed_double,"
        "omega_exact,rel_err_solver,rel_err_closed_single,rel_err_closed_double,"
        "trivial,u1_at_0"
    )
    assert len(lines) == 3  # header + 2 rows
    linear_row = lines[1].split(",")
    assert float(linear_row[6]) <= 1e-10  # eps = 0: solver matches exact


def test_sweep_golden_default_run(tmp_path):
    out = tmp_path / "sweep.csv"
    result = run_cli(
        "sweep", "--preset", "duffing", "--space", "al-single", "--out", str(out),
    )
    assert result.returncode == 0
    produced = out.read_text(encoding="utf-8").splitlines()
    golden = GOLDEN.read_text(encoding="utf-8").splitlines()
    assert produced[0] == golden[0]
    assert len(produced) == len(golden) == 10  # header + 3x3 grid
    for got, want in zip(produced[1:], golden[1:]):
        got_fields = got.split(",")
        want_fields = want.split(",")
        assert got_fields[9] == want_fields[9]  # trivial flag
        numeric = list(range(9)) + [10]
        for idx in numeric:
            assert float(got_fields[idx]) == float(want_fields[idx])


def test_exact_verb_agreement():
    result = run_cli("exact", "--preset", "duffing", "--A", "1", "--eps", "1")
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    methods = {entry["method"]: entry for entry in payload["results"]}
    assert set(methods) == {"quadrature", "ode-event"}
    assert methods["quadrature"]["frequency"] == pytest.approx(
        methods["ode-event"]["frequency"], rel=1e-8
    )


def test_exact_non_oscillatory_is_domain_error():
    result = run_cli("exact", "--preset", "duffing", "--A", "1", "--eps", "-2")
    assert result.returncode == 3
    assert "domain error" in result.stderr


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[problem]\n"
        "preset = duffing\n"
        "eps = 1.0\n"
        "A = 2.0\n"
        "\n"
        "[space]\n"
        "preset = al-single\n"
        "\n"
        "[output]\n"
        "format = json\n",
        encoding="utf-8",
    )
    from_file = run_cli("analyze", "--config", str(config))
    assert from_file.returncode == 0
    payload = json.loads(from_file.stdout)
    assert payload["problem"]["amplitude"] == 2.0
    # flags win over the file
    overridden = run_cli("analyze", "--config", str(config), "--A", "1")
    assert json.loads(overridden.stdout)["problem"]["amplitude"] == 1.0


def test_config_file_custom_space(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[problem]\n"
        "preset = duffing\n"
        "\n"
        "[space]\n"
        "preset = custom\n"
        "shapes = 1:1,5:-0.3333333333333333 | 3:0.2,5:-0.14285714285714285\n"
        "\n"
        "[output]\n"
        "format = json\n",
        encoding="utf-8",
    )
    result = run_cli("analyze", "--config", str(config))
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert payload["trial_space"]["name"] == "custom"
    assert len(payload["trial_space"]["shapes"]) == 2


def test_bad_bracket_is_config_error():
    result = run_cli("analyze", "--bracket", "oops")
    assert result.returncode == 2
