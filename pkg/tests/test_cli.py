import json

import pytest
from typer.testing import CliRunner

from kolab_cli import EXIT_CAP, EXIT_MISMATCH, EXIT_USAGE, app

runner = CliRunner()


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ("P", "N", "T", "MODE", "SEED", "OUTPUT", "MAX_DIM", "AUTOMORPHISMS", "WORKERS", "Q_TARGET", "CONDITIONAL"):
        monkeypatch.delenv(f"KOLAB_{key}", raising=False)


def run_json(*args):
    result = runner.invoke(app, [*args, "--output", "json"])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


class TestDims:
    def test_rank_one(self):
        payload = run_json("dims", "--n", "1")
        assert payload["dims"] == {"-2": 1, "-1": 2, "0": 3, "1": 3, "2": 2, "3": 1}
        assert payload["total"] == 12
        assert payload["schema"] == 1
        assert "distinguished x3" in payload["index_map"]

    def test_text(self):
        result = runner.invoke(app, ["dims", "--n", "2"])
        assert result.exit_code == 0
        assert "total 72" in result.stdout

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("KOLAB_N", "2")
        assert run_json("dims")["total"] == 72

    def test_cap(self):
        result = runner.invoke(app, ["dims", "--n", "3", "--max-dim", "10"])
        assert result.exit_code == EXIT_CAP

    def test_bad_prime(self):
        result = runner.invoke(app, ["dims", "--p", "4"])
        assert result.exit_code == EXIT_USAGE


class TestBracket:
    def test_known_value(self):
        payload = run_json("bracket", "x1*x3", "1", "--n", "1")
        assert payload["bracket"] == "2*x1"

    def test_unit_with_itself(self):
        assert run_json("bracket", "1", "1")["bracket"] == "0"

    def test_check_path(self):
        result = runner.invoke(app, ["bracket", "x1*x2", "x1", "--check"])
        assert result.exit_code == 0
        assert "check: ok" in result.stdout

    @pytest.mark.parametrize("a", ["x9", "x1 + x2", "x1^(5)", "((x1"])
    def test_usage_errors(self, a):
        result = runner.invoke(app, ["bracket", a, "1"])
        assert result.exit_code == EXIT_USAGE


class TestOtherCommands:
    def test_expand(self):
        assert run_json("expand", "x1")["expansion"] == "d2 + 2*x1 * d3"

    def test_wbracket(self):
        assert run_json("wbracket", "d1", "x1 * d2")["bracket"] == "d2"

    def test_nil_zero(self):
        payload = run_json("nil", "0")
        assert payload["verdict"]["kind"] == "nilpotent-stable"
        assert payload["verdict"]["index"] == 1
        assert payload["verified"] is True

    def test_nil_torus(self):
        payload = run_json("nil", "x1*x2")
        assert payload["verdict"]["kind"] == "not-nilpotent"
        assert payload["verified"] is True

    def test_nil_partner(self):
        result = runner.invoke(app, ["nil", "x2"])
        assert result.exit_code == 0
        assert "not-nilpotent (growing-index)" in result.stdout


class TestExport:
    def test_deterministic(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        assert runner.invoke(app, ["export", str(first), "--n", "1"]).exit_code == 0
        assert runner.invoke(app, ["export", str(second), "--n", "1"]).exit_code == 0
        assert first.read_bytes() == second.read_bytes()
        assert json.loads(first.read_text())["classification_invariant"] == 3

    def test_unwritable(self, tmp_path):
        target = tmp_path / "missing" / "out.json"
        result = runner.invoke(app, ["export", str(target)])
        assert result.exit_code == EXIT_USAGE


class TestVerify:
    def test_structure_suite(self):
        result = runner.invoke(app, ["verify", "--suite", "s1", "--n", "1"])
        assert result.exit_code == 0, result.output
        assert "Verification complete" in result.stdout

    def test_raw_invariants_json(self):
        result = runner.invoke(app, ["verify", "--suite", "s3", "--mode", "raw", "--output", "json"])
        assert result.exit_code == 0, result.output
        reports = {r["name"]: r for r in json.loads(result.stdout)["reports"]}
        assert reports["T"]["verdict"] == "conditional"
        assert reports["T"]["rerun"]["verdict"] == "match"

    def test_conditional_fail_policy(self):
        result = runner.invoke(app, ["verify", "--suite", "s3", "--mode", "raw", "--conditional", "fail"])
        assert result.exit_code == EXIT_MISMATCH

    def test_unknown_suite(self):
        result = runner.invoke(app, ["verify", "--suite", "s9"])
        assert result.exit_code == EXIT_USAGE

    def test_report_csv(self, tmp_path):
        path = tmp_path / "runs.csv"
        result = runner.invoke(app, ["verify", "--suite", "s3", "--report-csv", str(path)])
        assert result.exit_code == 0, result.output
        assert path.exists()
