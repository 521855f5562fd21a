import io
import json
import subprocess
import sys

import pytest

from idemsum.cli import RunConfig, execute, main, parse_args
from idemsum.decompose import clear_caches


def run(argv):
    cfg = parse_args(argv)
    buf = io.StringIO()
    code = execute(cfg, stdout=buf)
    return code, json.loads(buf.getvalue()) if buf.getvalue() else None


def strip_timing(report):
    if isinstance(report, dict):
        return {k: strip_timing(v) for k, v in report.items() if k != "elapsed_s"}
    if isinstance(report, list):
        return [strip_timing(v) for v in report]
    return report


def test_parse_decompose_example():
    cfg = parse_args(["decompose", "--ring", "Z4", "--n", "2", "--kind", "idempotent", "--k", "3", "--target", "[[1,1],[1,0]]"])
    assert cfg.command == "decompose" and cfg.target == [[1, 1], [1, 0]] and cfg.k == 3 and cfg.prune


def test_parse_survey_example():
    cfg = parse_args(["survey", "--ring", "Z4", "--n", "3", "--kind", "idempotent", "--kmax", "3"])
    assert (cfg.ring, cfg.n, cfg.k_max) == ("Z4", 3, 3)


@pytest.mark.parametrize(
    "argv",
    [
        ["decompose", "--ring", "Z0", "--n", "2", "--target", "[[1]]"],
        ["decompose", "--ring", "Z4", "--n", "2", "--target", "[[1,1],[1"],
        ["decompose", "--ring", "Z4", "--n", "2", "--target", "[[1,1],[1,9]]"],
        ["decompose", "--ring", "Z4", "--n", "3", "--target", "[[1,1],[1,0]]"],
        ["decompose", "--ring", "Z4", "--n", "2", "--k", "0", "--target", "[[1,1],[1,0]]"],
        ["survey", "--ring", "Z4", "--n", "2", "--kmax", "7"],
        ["survey", "--ring", "Z4", "--n", "2", "--workers", "0"],
        ["verify", "--theorem", "thm_9_9"],
        ["verify"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == 2


def test_config_round_trip():
    cfg = parse_args(["survey", "--ring", "Z2xZ3", "--n", "2", "--kmax", "2", "--budget", "5", "--resume-from", "10"])
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    with pytest.raises(ValueError):
        RunConfig.from_dict({**cfg.to_dict(), "brute_cap": 0})
    with pytest.raises(ValueError):
        RunConfig.from_dict({**cfg.to_dict(), "bogus": 1})


def test_decompose_negative_exits_one():
    code, rep = run(["decompose", "--ring", "Z4", "--n", "2", "--k", "3", "--target", "[[1,1],[1,0]]"])
    assert code == 1 and rep["decomposable"] is False and rep["witness"] is None and rep["pruned"]
    code, rep = run(["decompose", "--ring", "Z4", "--n", "2", "--k", "3", "--target", "[[1,1],[1,0]]", "--no-prune"])
    assert code == 1 and not rep["pruned"] and rep["checked"] == 26


def test_decompose_positive_exits_zero():
    code, rep = run(["decompose", "--ring", "Z5", "--n", "2", "--kind", "idempotent", "--k", "3", "--target", "[[4,0],[0,4]]"])
    assert code == 0 and rep["decomposable"] and len(rep["witness"]) == 3
    assert rep["config"]["target"] == [[4, 0], [0, 4]]
    assert list(rep)[:2] == ["command", "config"]


def test_enum_report():
    code, rep = run(["enum", "--ring", "Z4", "--n", "2", "--kind", "idempotent", "--strategy", "auto"])
    assert code == 0
    assert list(rep)[2:8] == ["ring", "n", "kind", "strategy", "count", "elements"]
    assert rep["count"] == 26 == len(rep["elements"]) and rep["strategy"] == "lifted"


def test_survey_csv_and_out(tmp_path):
    out, table = tmp_path / "census.json", tmp_path / "census.csv"
    cfg = parse_args(["survey", "--ring", "Z4", "--n", "2", "--kmax", "3", "--out", str(out), "--csv", str(table)])
    assert execute(cfg) == 0
    rep = json.loads(out.read_text())
    assert rep["complete"] and rep["non_decomposable_count"] == 16
    lines = table.read_text().splitlines()
    assert lines[0] == "k,minimal,cumulative,exact" and lines[-1] == "none,16,,"


def test_survey_resume_and_budget():
    code, head = run(["survey", "--ring", "Z5", "--n", "2", "--budget", "0.000000001"])
    assert code == 2 and not head["complete"]
    code, tail = run(["survey", "--ring", "Z5", "--n", "2", "--resume-from", str(head["next_index"])])
    assert code == 0 and tail["complete"] and tail["next_index"] == 625


def test_unwritable_output_exits_two(tmp_path):
    cfg = parse_args(["enum", "--ring", "Z2", "--n", "1", "--out", str(tmp_path / "missing" / "x.json")])
    assert execute(cfg) == 2


def test_runtime_errors_exit_two():
    code, rep = run(["survey", "--ring", "Z64", "--n", "3"])
    assert code == 2 and "CapacityError" in rep["error"]


@pytest.mark.parametrize("argv", [
    ["survey", "--ring", "Z4", "--n", "3", "--kmax", "3"],
    ["survey", "--ring", "Z3", "--n", "2", "--kind", "involution"],
    ["decompose", "--ring", "Z5", "--n", "3", "--target", "[[4,0,0],[0,4,0],[0,0,4]]", "--no-prune"],
    ["enum", "--ring", "Z5", "--n", "3"],
])
def test_reports_identical_across_workers(argv):
    reports = []
    for w in ("1", "2", "8"):
        clear_caches()
        cfg = parse_args(argv + ["--workers", w])
        buf = io.StringIO()
        execute(cfg, stdout=buf)
        rep = json.loads(buf.getvalue())
        assert rep["config"]["workers"] == int(w)
        rep["config"].pop("workers")
        reports.append(json.dumps(strip_timing(rep)))
    assert reports[0] == reports[1] == reports[2]


def test_workers_env(monkeypatch):
    monkeypatch.setenv("IDEMSUM_WORKERS", "3")
    assert parse_args(["enum", "--ring", "Z2", "--n", "1"]).workers == 3


def test_verify_all_quick_exits_zero():
    code, rep = run(["verify", "--all", "--profile", "quick"])
    assert code == 0 and rep["failed"] == 0 and rep["passed"] == len(rep["results"])


def test_verify_single_alias():
    code, rep = run(["verify", "--theorem", "lemma_2_5", "--profile", "quick"])
    assert code == 0 and rep["results"][0]["theorem"] == "lemma_2_4_2_5"


def test_open_question_n2():
    code, rep = run(["open-question", "--n", "2"])
    assert code == 0 and rep["extra"]["outcome"] == "not all decomposable"
    assert [[1, 1], [1, 0]] in rep["extra"]["non_decomposable_literals"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "idemsum", "decompose", "--ring", "Z4", "--n", "2", "--target", "[[1,1],[1,0]]"], capture_output=True, text=True)
    assert proc.returncode == 1 and json.loads(proc.stdout)["decomposable"] is False
    assert main(["enum", "--ring", "Z2", "--n", "1"]) == 0
