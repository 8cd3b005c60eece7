import json

import pytest
from click.testing import CliRunner

from qseven import sweeps
from qseven.cli import main, verify
from qseven.sweeps import CSV_COLUMNS


@pytest.fixture
def runner():
    return CliRunner()


def test_spec_example_units_under_200(runner):
    result = runner.invoke(verify, ["units", "--q-min", "1", "--q-max", "200", "--residue", "7mod16"])
    assert result.exit_code == 0
    records = json.loads(result.stdout)
    assert [r["q"] for r in records] == [7, 23, 71, 103, 151, 167, 199]
    assert all(r["results"]["units"]["tuple"] == [2, 3] for r in records)
    assert "7 ok, 0 skipped, 0 failed" in result.stderr


def test_csv_format_header_literal(runner):
    result = runner.invoke(verify, ["hasse", "--q-max", "30", "--format", "csv"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "q,class,ord_w,ord_wstar(s),xstar_order_or_r,hasse_2part,r_q,trace_ord,cw_val,lseries_verdict,status"
    assert len(lines) == 1 + 2  # 7, 23


def test_md_format(runner):
    result = runner.invoke(verify, ["lseries", "--q-max", "10", "--format", "md"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "| " + " | ".join(CSV_COLUMNS) + " |"
    assert "| 7 |" in lines[2]


def test_out_writes_file(runner, tmp_path):
    out = str(tmp_path / "report.json")
    result = runner.invoke(verify, ["classgroups", "--q-max", "40", "--out", out])
    assert result.exit_code == 0
    assert result.stdout == ""
    records = json.loads(open(out).read())
    assert [r["q"] for r in records] == [7, 23, 31]


def test_exit_one_on_failure(runner, monkeypatch):
    def boom(q):
        raise ArithmeticError("synthetic failure")

    monkeypatch.setattr(sweeps, "hasse_check", boom)
    result = runner.invoke(verify, ["hasse", "--q-max", "10", "--format", "csv"])
    assert result.exit_code == 1
    assert "fail" in result.stdout
    assert "1 failed" in result.stderr


def test_skip_does_not_fail_exit_code(runner, monkeypatch):
    from qseven.realquad import BudgetSkip

    def tired(q, bits):
        raise BudgetSkip(q, 999, 999)

    monkeypatch.setattr(sweeps, "trace_tests", tired)
    result = runner.invoke(verify, ["units", "--q-max", "10"])
    assert result.exit_code == 0
    assert "1 skipped" in result.stderr
    records = json.loads(result.stdout)
    assert records[0]["status"] == "skip"


def test_unknown_suite_is_usage_error(runner):
    result = runner.invoke(verify, ["zeta", "--q-max", "10"])
    assert result.exit_code == 2


def test_unwritable_out_is_startup_error(runner):
    result = runner.invoke(verify, ["hasse", "--q-max", "10", "--out", "/nonexistent-dir/report.json"])
    assert result.exit_code == 1
    assert "not writable" in result.stderr


def test_unwritable_cache_is_startup_error(runner):
    result = runner.invoke(verify, ["units", "--q-max", "10", "--cache", "/nonexistent-dir/units.jsonl"])
    assert result.exit_code == 1
    assert "not writable" in result.stderr


def test_warm_cache_rerun_byte_identical(runner, tmp_path):
    out1 = str(tmp_path / "r1.json")
    out2 = str(tmp_path / "r2.json")
    cache = str(tmp_path / "units.jsonl")
    args = ["units", "--q-max", "60", "--cache", cache]
    assert runner.invoke(verify, args + ["--out", out1]).exit_code == 0
    assert runner.invoke(verify, args + ["--out", out2]).exit_code == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_all_runs_every_suite(runner):
    result = runner.invoke(verify, ["all", "--q-max", "10", "--format", "csv"])
    assert result.exit_code == 0
    row = result.stdout.splitlines()[1].split(",")
    assert "" not in row


def test_group_exposes_verify_and_serve(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    assert "verify" in result.stdout and "serve" in result.stdout
    result = runner.invoke(main, ["--version"])
    assert "0.1.0" in result.stdout


def test_jobs_flag_passes_through(runner):
    result = runner.invoke(verify, ["lseries", "--q-max", "60", "--jobs", "2", "--format", "csv"])
    assert result.exit_code == 0
    assert len(result.stdout.splitlines()) == 1 + 4  # 7, 23, 31, 47
