"""
Tests for the evaluation protocol, metrics, stratified sampling, PRM
labels and SFT filtering.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from src.agents import GreedyIisAgent, OracleAgent, RandomAgent
from src.env import (Action, DebugEnv, EnvConfig, OutcomeClass, RewardBreakdown, Transition,
                     run_actions)
from src.evaluation import (EpisodeRecord, EvalConfig, LabelBranch, compute_metrics,
                            filter_sft_trajectories, format_table, label_branch, parse_strata,
                            prm_label, read_records, run_episode, run_episodes,
                            stratified_sample, write_prm_labels, write_records)
from src.exceptions import EmptyInput, InsufficientPool, InvariantError, SchemaError
from src.saboteur import ErrorType
from src.saboteur.fixtures import production_conflict
from src.solver import SolveStatus


@pytest.fixture(scope="module")
def conflict():
    return production_conflict()


def make_record(instance_id: str, outcome: OutcomeClass, step=None, attempt: int = 0,
                error_type: str = "A", difficulty: str = "easy", da: float = 0.5,
                op: float = 0.0, repair_steps: int = 1, total_steps: int = None) -> EpisodeRecord:
    success = outcome is not OutcomeClass.FAILURE
    return EpisodeRecord(
        instance_id=instance_id,
        attempt_index=attempt,
        error_type=error_type,
        difficulty=difficulty,
        success=success,
        first_success_step=step if success else None,
        da=da,
        op=op,
        repair_steps=repair_steps,
        total_steps=total_steps if total_steps is not None else (step or 0),
        outcome=outcome,
        final_status=SolveStatus.OPTIMAL if success else SolveStatus.INFEASIBLE,
    )


# --- metrics -----------------------------------------------------------------------

def test_metrics_example():
    """Test one Full at step 3, one Partial and two Failures"""
    records = [
        make_record("i1", OutcomeClass.FULL_SUCCESS, step=3, da=1.0, op=1.0, repair_steps=2),
        make_record("i2", OutcomeClass.PARTIAL_SUCCESS, step=4, da=0.5, op=0.9, repair_steps=4),
        make_record("i3", OutcomeClass.FAILURE, da=0.5),
        make_record("i4", OutcomeClass.FAILURE, da=0.0),
    ]
    table = compute_metrics(records, k_max=5)
    assert table.rr == 50.0
    assert table.rr_at_k[5] == 25.0
    assert table.rr_at_k[2] == 0.0
    assert table.rr_at_k[3] == 25.0
    assert table.da_mean == pytest.approx(50.0)
    assert table.op_mean == pytest.approx(0.95)
    assert table.avg_steps == pytest.approx(3.0)
    assert table.instances == 4
    assert table.episodes == 4


def test_metrics_aggregate_attempts_per_instance():
    """Test that an instance counts once and uses its best Full attempt"""
    records = [
        make_record("i1", OutcomeClass.FAILURE, attempt=0),
        make_record("i1", OutcomeClass.FULL_SUCCESS, step=7, attempt=1),
        make_record("i1", OutcomeClass.FULL_SUCCESS, step=2, attempt=2),
        make_record("i2", OutcomeClass.FAILURE, attempt=0),
    ]
    table = compute_metrics(records, k_max=5)
    assert table.rr == 50.0
    assert table.rr_at_k[2] == 50.0
    assert table.instances == 2
    assert table.episodes == 4


def test_metrics_breakdowns():
    """Test per-type and per-difficulty tables"""
    records = [
        make_record("a", OutcomeClass.FULL_SUCCESS, step=1, error_type="A", difficulty="easy"),
        make_record("h", OutcomeClass.FAILURE, error_type="H", difficulty="expert"),
    ]
    table = compute_metrics(records)
    assert set(table.per_error_type) == {"A", "H"}
    assert table.per_error_type["A"].rr == 100.0
    assert table.per_difficulty["expert"].rr == 0.0
    text = format_table(table)
    assert "RR@5" in text
    assert "type A" in text
    data = table.to_dict()
    assert data["rr_at_k"]["5"] == 50.0


def test_rr_at_k_is_monotone():
    """Test RR@k never decreases in k and never exceeds RR over 10,000 record sets"""
    rng = np.random.default_rng(0)
    outcomes = list(OutcomeClass)
    for _ in range(10_000):
        records = []
        for i in range(int(rng.integers(1, 5))):
            for attempt in range(int(rng.integers(1, 4))):
                outcome = outcomes[int(rng.integers(3))]
                records.append(make_record(f"i{i}", outcome, step=int(rng.integers(0, 12)),
                                           attempt=attempt))
        table = compute_metrics(records, k_max=10)
        values = [table.rr_at_k[k] for k in range(1, 11)]
        assert values == sorted(values)
        assert values[-1] <= table.rr


def test_metrics_reject_empty_input():
    """Test EmptyInput on no records"""
    with pytest.raises(EmptyInput):
        compute_metrics([])


def test_success_needs_a_step():
    """Test that a successful record without first_success_step is rejected"""
    with pytest.raises(SchemaError):
        EpisodeRecord("i", 0, "A", "easy", True, None, 1.0, 1.0, 1, 1,
                      OutcomeClass.FULL_SUCCESS, SolveStatus.OPTIMAL)


# --- protocol --------------------------------------------------------------------------

def test_oracle_ceiling(bench):
    """Test that the oracle scores RR@5 = 100% and DA = 100% on the generated bench"""
    records = run_episodes(OracleAgent, bench, EvalConfig(k=2))
    assert [(r.instance_id, r.attempt_index) for r in records] == \
        [(inst.id, a) for inst in bench for a in range(2)]
    table = compute_metrics(records, k_max=5)
    assert table.rr == 100.0
    assert table.rr_at_k[5] == 100.0
    assert table.da_mean == pytest.approx(100.0)
    assert table.op_mean == pytest.approx(1.0)


def test_agent_ordering_on_generated_bench(bench):
    """Test oracle >= greedy >= random on RR and RR@5"""
    cfg = EvalConfig(k=2, max_steps=20, workers=3, seed=3)
    tables = {agent.name: compute_metrics(run_episodes(agent, bench, cfg), k_max=5)
              for agent in (OracleAgent, GreedyIisAgent, RandomAgent)}
    oracle, greedy, uniform = tables["oracle"], tables["greedy"], tables["random"]
    assert oracle.rr == 100.0
    assert oracle.rr >= greedy.rr >= uniform.rr
    assert oracle.rr_at_k[5] >= greedy.rr_at_k[5] >= uniform.rr_at_k[5]


def test_records_do_not_depend_on_workers(conflict):
    """Test identical records for one and several worker threads"""
    instances = [conflict, replace(conflict, id="fixture_copy")]
    cfg = EvalConfig(k=3, max_steps=8, seed=5)
    serial = run_episodes(RandomAgent, instances, cfg)
    parallel = run_episodes(RandomAgent, instances, replace(cfg, workers=4))
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def test_eval_config_validation():
    """Test EvalConfig invariants"""
    with pytest.raises(InvariantError):
        EvalConfig(k=0)
    with pytest.raises(InvariantError):
        EvalConfig(workers=0)
    assert EvalConfig(max_steps=7).env_config.max_steps == 7


def test_records_file_round_trip(conflict, tmp_path):
    """Test that records survive write/read including trajectories"""
    record = run_episode(DebugEnv(conflict), OracleAgent(), attempt=0, seed=0)
    path = str(tmp_path / "records.jsonl")
    assert write_records(path, [record]) == 1
    loaded = read_records(path)
    assert [r.to_dict() for r in loaded] == [record.to_dict()]
    assert len(loaded[0].trajectory) == 3


# --- stratified sampling --------------------------------------------------------------

@pytest.fixture(scope="module")
def synthetic_bench(conflict):
    return [replace(conflict, id=f"{t.value}_{n:04d}", error_type=t)
            for t in ErrorType for n in range(20)]


def test_stratified_sample_counts(synthetic_bench):
    """Test exact per-tier counts and benchmark order"""
    counts = {"easy": 10, "hard": 7, "expert": 5}
    sample = stratified_sample(synthetic_bench, counts, seed=1)
    tiers = Counter(
        "easy" if i.error_type.value in "ABCD" else "hard" if i.error_type.value in "EFG"
        else "expert" for i in sample)
    assert tiers == counts
    order = [i.id for i in synthetic_bench]
    positions = [order.index(i.id) for i in sample]
    assert positions == sorted(positions)
    assert len({i.id for i in sample}) == len(sample)


def test_stratified_sample_is_deterministic(synthetic_bench):
    """Test same seed gives the same sample"""
    counts = {t.value: 3 for t in ErrorType}
    first = stratified_sample(synthetic_bench, counts, seed=2, key="type")
    second = stratified_sample(synthetic_bench, counts, seed=2, key="type")
    assert [i.id for i in first] == [i.id for i in second]
    assert Counter(i.error_type.value for i in first) == counts


def test_stratified_sample_errors(synthetic_bench):
    """Test InsufficientPool and unknown stratum keys"""
    with pytest.raises(InsufficientPool) as exc_info:
        stratified_sample(synthetic_bench, {"expert": 41}, seed=0)
    assert exc_info.value.stratum == "expert"
    assert exc_info.value.requested == 41
    assert exc_info.value.available == 40
    with pytest.raises(InvariantError):
        stratified_sample(synthetic_bench, {"easy": 1}, seed=0, key="colour")


def test_parse_strata():
    """Test the count-spec parser for strata"""
    assert parse_strata("easy=180, hard=158") == {"easy": 180, "hard": 158}
    with pytest.raises(InvariantError):
        parse_strata("easy=lots")


# --- PRM labels -------------------------------------------------------------------------

ZERO_REWARD = RewardBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def transition(action: Action, status: SolveStatus, before: int, after: int) -> Transition:
    return Transition("digest", action, ZERO_REWARD, status, before, after, 1)


def test_label_branches(conflict):
    """Test each labelling rule and the rule order"""
    gt = conflict.ground_truth
    relax = Action.relax("c1_total", 1.0)
    assert label_branch(0, transition(relax, SolveStatus.OPTIMAL, 4, 0), gt) is LabelBranch.SOLVED
    assert label_branch(1, transition(relax, SolveStatus.INFEASIBLE, 4, 3), gt) \
        is LabelBranch.IIS_SHRANK
    diagnosed = Action.relax("c1_total", 1.0, diagnosis=["c1_total"])
    assert label_branch(0, transition(diagnosed, SolveStatus.INFEASIBLE, 4, 3), gt) \
        is LabelBranch.CORRECT_DIAGNOSIS
    assert label_branch(2, transition(Action.get_iis(), SolveStatus.INFEASIBLE, 4, 4), gt) \
        is LabelBranch.INFORMATION_GATHERING
    for look in (Action.check_slack("c1_total"), Action.check_bound("x1")):
        assert label_branch(2, transition(look, SolveStatus.INFEASIBLE, 4, 4), gt) \
            is LabelBranch.INFORMATION_GATHERING
    assert label_branch(2, transition(relax, SolveStatus.INFEASIBLE, 4, 4), gt) \
        is LabelBranch.NO_PROGRESS
    assert LabelBranch.CORRECT_DIAGNOSIS.value_label == 0.5


def test_prm_labels_on_oracle_trajectory(conflict, tmp_path):
    """Test labels for GET_IIS(diagnosis), the repair and SUBMIT"""
    plan = [Action.get_iis(["c3_min_1"]), Action.relax("c3_min_1", -10.0), Action.submit()]
    _, log = run_actions(DebugEnv(conflict), plan)
    assert prm_label(log, conflict.ground_truth) == [0.5, 1.0, 1.0]

    record = run_episode(DebugEnv(conflict), OracleAgent(), attempt=0, seed=0)
    path = tmp_path / "prm.jsonl"
    assert write_prm_labels(str(path), [record], {conflict.id: conflict.ground_truth}) == 3
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert [row["t"] for row in rows] == [0, 1, 2]
    assert rows[0]["branch"] == "correct_diagnosis"
    assert all(row["schema_version"] == 1 for row in rows)


def test_sft_filter():
    """Test success, step and DA thresholds"""
    keep = make_record("a", OutcomeClass.FULL_SUCCESS, step=3, da=1.0)
    records = [
        keep,
        make_record("b", OutcomeClass.FULL_SUCCESS, step=6, da=1.0),
        make_record("c", OutcomeClass.PARTIAL_SUCCESS, step=2, da=0.4),
        make_record("d", OutcomeClass.FAILURE, da=1.0, total_steps=2),
    ]
    assert filter_sft_trajectories(records) == [keep]
    assert len(filter_sft_trajectories(records, max_steps=6)) == 2
