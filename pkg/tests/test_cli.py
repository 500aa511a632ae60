"""
End-to-end tests for the orgym command line.

Each command runs in-process through cli_dispatch; files go to tmp_path.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json

import pytest

from src.cli import cli_dispatch
from src.lp import SCHEMA_VERSION
from src.seeding import SEED_ENV_VAR

from tests.conftest import TEST_SEED


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_jsonl(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def last_error(capsys) -> dict:
    lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


@pytest.fixture(scope="module")
def bench_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "bench.jsonl"
    code = cli_dispatch(["gen-debug", "--out", str(out), "--counts", "A=1,E=1,H=1",
                         "--pool-size", "9", "--max-regenerations", "10",
                         "--seed", str(TEST_SEED)])
    assert code == 0
    return out


def test_unknown_command_is_a_usage_error():
    """Test that argparse failures map to exit code 2"""
    assert cli_dispatch(["frobnicate"]) == 2
    assert cli_dispatch([]) == 2


def test_gen_debug_writes_benchmark_and_manifest(bench_file):
    """Test the benchmark file and the manifest written next to it"""
    rows = read_jsonl(bench_file)
    assert [row["id"] for row in rows] == ["A_0000", "E_0000", "H_0000"]
    assert all(row["schema_version"] == SCHEMA_VERSION for row in rows)

    manifest = read_json(str(bench_file).replace(".jsonl", ".manifest.json"))
    assert manifest["command"] == "gen-debug"
    assert manifest["seed"] == TEST_SEED
    assert manifest["exit_code"] == 0
    assert manifest["stats"]["instances"] == 3
    assert str(bench_file) in manifest["outputs"]
    assert set(manifest["seeds"]) >= {"pool", "generation", "sampling"}


def test_validate_passes(bench_file, capsys):
    """Test four-fold validation of a generated benchmark"""
    assert cli_dispatch(["validate", "--bench", str(bench_file)]) == 0
    assert "3/3 passed" in capsys.readouterr().out


def test_eval_report_and_replay(bench_file, tmp_path, capsys):
    """Test the oracle run, the report from its records and an identical replay"""
    records = tmp_path / "records.jsonl"
    report = tmp_path / "metrics.json"
    prm = tmp_path / "prm.jsonl"
    code = cli_dispatch(["eval", "--bench", str(bench_file), "--agent", "oracle", "--k", "1",
                         "--out", str(records), "--report", str(report),
                         "--prm-out", str(prm)])
    assert code == 0
    assert "RR@5" in capsys.readouterr().out
    metrics = read_json(report)
    assert metrics["schema_version"] == SCHEMA_VERSION
    assert metrics["rr"] == 100.0
    assert len(read_jsonl(records)) == 3
    assert all(row["schema_version"] == SCHEMA_VERSION for row in read_jsonl(prm))

    summary = tmp_path / "summary.json"
    assert cli_dispatch(["report", str(records), "--k", "3", "--json", str(summary),
                         "--figures", str(tmp_path / "figs")]) == 0
    assert read_json(summary)["rr"] == 100.0
    assert (tmp_path / "figs" / "recovery_rr_at_k.png").exists()

    assert cli_dispatch(["replay", "--bench", str(bench_file), "--records", str(records)]) == 0
    assert "0 mismatch(es)" in capsys.readouterr().out


def test_gen_and_eval_bias(tmp_path, capsys):
    """Test split generation and oracle decisions scoring zero bias"""
    dataset = tmp_path / "bias.jsonl"
    prompts = tmp_path / "prompts.jsonl"
    assert cli_dispatch(["gen-bias", "--out", str(dataset), "--n-id", "40", "--n-ood", "20",
                         "--prompts-out", str(prompts), "--seed", "3"]) == 0
    assert len(read_jsonl(dataset)) == 60
    assert len(read_jsonl(prompts)) == 60

    report = tmp_path / "bias_report.json"
    decisions = tmp_path / "decisions.jsonl"
    assert cli_dispatch(["eval-bias", "--dataset", str(dataset), "--policy", "oracle",
                         "--decisions-out", str(decisions), "--report", str(report)]) == 0
    data = read_json(report)
    assert data["bias_diff"] == pytest.approx(0.0, abs=1e-6)
    assert data["rationality"] == 100.0

    again = tmp_path / "again.json"
    assert cli_dispatch(["eval-bias", "--dataset", str(dataset), "--decisions", str(decisions),
                         "--report", str(again), "--figures", str(tmp_path / "figs")]) == 0
    assert (tmp_path / "figs" / "bias_by_cr_bucket.png").exists()
    assert read_json(again)["bias_diff"] == pytest.approx(data["bias_diff"])
    assert "Bias Diff" in capsys.readouterr().out


def test_gen_bias_curriculum(tmp_path):
    """Test the per-level curriculum preset"""
    out = tmp_path / "train.jsonl"
    assert cli_dispatch(["gen-bias", "--out", str(out), "--curriculum", "levels",
                         "--per-level", "5"]) == 0
    assert len(read_jsonl(out)) == 20


def test_seed_falls_back_to_environment(tmp_path, monkeypatch):
    """Test $ORGYM_SEED when --seed is absent, and its validation"""
    monkeypatch.setenv(SEED_ENV_VAR, "5")
    out = tmp_path / "env_seed.jsonl"
    assert cli_dispatch(["gen-bias", "--out", str(out), "--n-id", "4", "--n-ood", "2"]) == 0
    assert read_json(tmp_path / "env_seed.manifest.json")["seed"] == 5

    monkeypatch.setenv(SEED_ENV_VAR, "five")
    assert cli_dispatch(["gen-bias", "--out", str(out), "--n-id", "4", "--n-ood", "2"]) == 1


def test_missing_input_reports_json_error(tmp_path, capsys):
    """Test exit code 1 and a JSON error object on stderr"""
    missing = tmp_path / "nope.jsonl"
    assert cli_dispatch(["validate", "--bench", str(missing)]) == 1
    error = last_error(capsys)
    assert error["error"] == "FileNotFoundError"
    manifest = read_json(tmp_path / "nope.validate.manifest.json")
    assert manifest["exit_code"] == 1


def test_bad_schema_version_is_rejected(tmp_path, capsys):
    """Test that an unsupported schema_version fails cleanly"""
    bench = tmp_path / "future.jsonl"
    bench.write_text(json.dumps({"schema_version": 99, "id": "A_0000"}) + "\n")
    assert cli_dispatch(["validate", "--bench", str(bench)]) == 1
    error = last_error(capsys)
    assert error["error"] == "SchemaError"
    assert error["details"]["field"] == "schema_version"


def test_invalid_split_sizes(tmp_path, capsys):
    """Test that uneven split sizes are reported as an invariant error"""
    out = tmp_path / "bad.jsonl"
    assert cli_dispatch(["gen-bias", "--out", str(out), "--n-id", "5"]) == 1
    assert last_error(capsys)["error"] == "InvariantError"


def test_gen_debug_from_pool_file(tmp_path):
    """Test --pool reading seed models written by --pool-out, and its exclusion with --pool-size"""
    pool_file = tmp_path / "pool.jsonl"
    first = tmp_path / "first.jsonl"
    assert cli_dispatch(["gen-debug", "--out", str(first), "--counts", "A=1",
                         "--pool-size", "8", "--max-regenerations", "8",
                         "--pool-out", str(pool_file), "--seed", str(TEST_SEED)]) == 0
    assert len(read_jsonl(pool_file)) == 8

    second = tmp_path / "second.jsonl"
    assert cli_dispatch(["gen-debug", "--out", str(second), "--counts", "A=1",
                         "--pool", str(pool_file), "--max-regenerations", "8",
                         "--seed", str(TEST_SEED)]) == 0
    assert read_jsonl(second) == read_jsonl(first)
    manifest = read_json(tmp_path / "second.manifest.json")
    assert str(pool_file) in manifest["inputs"]
    assert manifest["config"]["pool_size"] == 8

    assert cli_dispatch(["gen-debug", "--out", str(second), "--pool", str(pool_file),
                         "--pool-size", "8"]) == 2
