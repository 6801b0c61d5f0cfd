"""Command-line interface: subcommands, flags, exit codes."""

from __future__ import annotations

import json

import pytest

from npefix.cli import main

from conftest import CORPUS, MANIFEST, SEEDING_DEMO

CRASH = CORPUS / "crashing" / "c02_no_value.mj"
REUSE = CORPUS / "crashing" / "c07_global_needed.mj"
PASSING = CORPUS / "passing" / "p05_while_sum.mj"


def run_cli(*args) -> int:
    return main([str(a) for a in args])


def test_transform_writes_instrumented_file(tmp_path, capsys):
    out = tmp_path / "out.mj"
    assert run_cli("transform", PASSING, "-o", out) == 0
    text = out.read_text()
    assert "__npefix_checkForNull" not in text  # no dereference sites here
    assert "__npefix_startMethod" in text


def test_transform_rejects_double_instrumentation(tmp_path, capsys):
    out = tmp_path / "out.mj"
    assert run_cli("transform", CRASH, "-o", out) == 0
    assert run_cli("transform", out, "-o", tmp_path / "again.mj") == 3
    assert "reserved prefix" in capsys.readouterr().err


def test_transform_syntax_error_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.mj"
    bad.write_text("class A {")
    assert run_cli("transform", bad) == 3
    assert "syntax error" in capsys.readouterr().err


def test_run_plain_program(capsys):
    assert run_cli("run", PASSING) == 0
    assert capsys.readouterr().out == "55\n"


def test_run_crash_exits_1(capsys):
    assert run_cli("run", CRASH) == 1
    assert "NullPointerException" in capsys.readouterr().err


def test_run_with_repairing_strategy(capsys):
    assert run_cli("run", CRASH, "--strategy", "S2a") == 0
    captured = capsys.readouterr()
    assert captured.out == "ping\nafter\n"


def test_run_with_failing_strategy_reports_outcome(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert run_cli("run", CRASH, "--strategy", "S1a", "--report", report) == 1
    record = json.loads(report.read_text())
    assert record["status"] == "NullPointerException"
    assert record["outcome"] == "NoV"
    captured = capsys.readouterr()
    assert "outcome NoV" in captured.err


def test_run_unskippable_case_outcome_us(tmp_path):
    report = tmp_path / "report.json"
    case = CORPUS / "crashing" / "c04_return_unskippable.mj"
    assert run_cli("run", case, "--strategy", "S3", "--report", report) == 1
    assert json.loads(report.read_text())["outcome"] == "US"


def test_run_trace_emits_repair_log(capsys):
    assert run_cli("run", CRASH, "--strategy", "S2a", "--trace") == 0
    err = capsys.readouterr().err
    lines = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
    assert any(ev["event"] == "try" for ev in lines)
    assert all("timestamp" in ev for ev in lines)


def test_strategy_and_explore_conflict_exits_2(capsys):
    assert run_cli("run", CRASH, "--strategy", "S3", "--explore") == 2


def test_unknown_flag_exits_2():
    assert run_cli("run", str(CRASH), "--bogus") == 2


def test_unknown_strategy_exits_2():
    assert run_cli("run", str(CRASH), "--strategy", "S9") == 2


def test_missing_file_exits_3(capsys):
    assert run_cli("run", "no_such_file.mj") == 3


def test_run_explore_prints_seed(capsys):
    assert run_cli("run", REUSE, "--explore", "--seed", "11") == 0
    assert "seed: 11" in capsys.readouterr().err


def test_explore_session_deploys(tmp_path, capsys):
    report = tmp_path / "session.json"
    code = run_cli("explore", REUSE, "--seed", "11", "--report", report)
    assert code == 0
    record = json.loads(report.read_text())
    assert record["outcome"] == "deployed"
    assert record["patches"]
    out = capsys.readouterr().out
    assert any(json.loads(line)["event"] == "deploy"
               for line in out.splitlines() if line)


def test_explore_exhausted_exits_1(tmp_path):
    case = CORPUS / "crashing" / "c15_exhausted"
    report = tmp_path / "session.json"
    assert run_cli("explore", case, "--seed", "0", "--report", report) == 1
    assert json.loads(report.read_text())["outcome"] == "exhausted"


def test_explore_reports_identical_for_identical_seeds(tmp_path):
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    run_cli("explore", REUSE, "--seed", "4", "--report", r1)
    run_cli("explore", REUSE, "--seed", "4", "--report", r2)
    assert r1.read_bytes() == r2.read_bytes()


def test_deployments_file_applies_without_exploration(tmp_path, capsys):
    session_report = tmp_path / "session.json"
    run_cli("explore", REUSE, "--seed", "11", "--report", session_report)
    record = json.loads(session_report.read_text())
    table = {key: {"strategy": value.split("(")[0],
                   "parameter": value.split("(")[1].rstrip(")")
                   if "(" in value else None}
             for key, value in record["deployments"].items()}
    deployments = tmp_path / "deployments.json"
    deployments.write_text(json.dumps(table))
    capsys.readouterr()
    assert run_cli("run", REUSE, "--deployments", deployments) == 0
    # The deployed strategy repairs the crash without any exploration.
    assert capsys.readouterr().out.endswith("fixed\n")


def test_seed_file_removes_checks(tmp_path, capsys):
    src = SEEDING_DEMO / "app" / "profile.mj"
    out = tmp_path / "seeded.mj"
    report = tmp_path / "seed.json"
    assert run_cli("seed", src, "-o", out, "--report", report) == 0
    assert json.loads(report.read_text())["count"] == 4
    assert "!= null" not in out.read_text()


def test_seed_project_runs_campaign(tmp_path, capsys):
    report = tmp_path / "campaign.json"
    assert run_cli("seed", SEEDING_DEMO, "--report", report,
                   "--format", "json") == 0
    record = json.loads(report.read_text())
    assert record["removed_checks"] == 12
    out = capsys.readouterr().out
    assert "union repair rate" in out


def test_matrix_text_and_json_reports(tmp_path, capsys):
    report = tmp_path / "matrix.json"
    assert run_cli("matrix", MANIFEST, "--report", report,
                   "--format", "json", "--jobs", "2") == 0
    record = json.loads(report.read_text())
    assert record["union"] >= 1
    out = capsys.readouterr().out
    assert "Union:" in out


def test_bench_reports(tmp_path, capsys):
    # A one-case manifest keeps the benchmark fast.
    manifest = tmp_path / "mini.json"
    manifest.write_text(json.dumps({
        "corpus": "mini",
        "cases": [{"name": "p05", "path": str(PASSING),
                   "expect": {"kind": "output", "stdout": "55\n"}}],
    }))
    report = tmp_path / "bench.json"
    assert run_cli("bench", manifest, "--reps", "3", "--report", report,
                   "--format", "json") == 0
    record = json.loads(report.read_text())
    assert record["cases"][0]["reps"] == 3
    assert "overhead" in capsys.readouterr().out


@pytest.mark.parametrize("sub", ["transform", "seed", "run", "matrix",
                                 "bench", "explore"])
def test_help_exits_zero_and_documents_flags(sub, capsys):
    assert main([sub, "--help"]) == 0
    text = capsys.readouterr().out
    expected_flags = {
        "transform": ["-o"],
        "seed": ["-o", "--report", "--format", "--depth"],
        "run": ["--strategy", "--explore", "--seed", "--depth",
                "--deployments", "--trace", "--report", "--format"],
        "matrix": ["--jobs", "--depth", "--report", "--format"],
        "bench": ["--reps", "--report", "--format"],
        "explore": ["--seed", "--depth", "--report"],
    }
    for flag in expected_flags[sub]:
        assert flag in text, f"{sub} --help must document {flag}"


def test_top_level_help_lists_subcommands(capsys):
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for sub in ("transform", "seed", "run", "matrix", "bench", "explore"):
        assert sub in text
