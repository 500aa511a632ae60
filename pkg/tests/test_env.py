"""
Tests for the debugging environment: reference fixtures, actions, reward
and episode flow.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math
from dataclasses import replace

import pytest

from src.exceptions import (EpisodeOver, InvalidAction, OracleDisagreement, SchemaError,
                            SolverFailure)
from src.env import (Action, ActionKind, DebugEnv, EnvConfig, EpisodeState, OutcomeClass,
                     action_to_edit, classify_outcome, compute_reward, diagnostic_accuracy,
                     edit_to_action, is_off_target, optimality_preservation, run_actions)
from src.lp import BoundSide, ModelEdit, Sense
from src.saboteur import ErrorType, validate
from src.saboteur.fixtures import all_fixtures, production_conflict, transport_overallocation
from src.solver import SolveStatus


@pytest.fixture(scope="module")
def conflict():
    return production_conflict()


@pytest.fixture(scope="module")
def transport():
    return transport_overallocation()


# --- reference fixtures ------------------------------------------------------

def test_production_conflict_fixture(conflict):
    """Test the hand-built capacity conflict and its IIS"""
    assert conflict.error_type is ErrorType.C
    assert conflict.ground_truth.original_objective == pytest.approx(100.0)
    iis = conflict.ground_truth.iis_gt
    assert {"c1_total", "c2_min_0", "c3_min_1"} <= set(iis.members)
    assert iis.size == 4   # plus whichever row keeps x2 non-negative
    assert "c3_min_1" in iis


def test_transport_fixture(transport):
    """Test the over-allocation fixture"""
    assert transport.error_type is ErrorType.E
    assert transport.sabotaged.constraint("d1_min").rhs == 35.0
    assert "d1_min" in transport.ground_truth.iis_gt
    assert transport.ground_truth.fix == (ModelEdit.relax("d1_min", -15.0),)


def test_all_fixtures_pass_validation():
    """Test that both fixtures are valid benchmark instances"""
    for inst in all_fixtures():
        assert validate(inst).passed


# --- episode flow ----------------------------------------------------------------

def test_repair_flow_on_capacity_conflict(conflict):
    """Test GET_IIS, RELAX(c3_min_1, -10), SUBMIT reaching OPTIMAL at step 2"""
    env = DebugEnv(conflict)
    state, log = run_actions(env, [
        Action.get_iis(),
        Action.relax("c3_min_1", -10.0, diagnosis=["c3_min_1"]),
        Action.submit(),
    ])
    assert state.done
    assert state.status is SolveStatus.OPTIMAL
    assert state.step == 2
    assert state.objective == pytest.approx(100.0)
    assert [t.step for t in log] == [0, 1, 2]
    assert log[0].iis_size_before == 4
    assert log[1].iis_size_after == 0
    outcome, op = classify_outcome(state, conflict.ground_truth)
    assert outcome is OutcomeClass.FULL_SUCCESS
    assert op == pytest.approx(1.0)


def test_repair_flow_on_transport(transport):
    """Test RELAX(d1_min, -15) restoring OPTIMAL"""
    env = DebugEnv(transport)
    state, _ = run_actions(env, [Action.relax("d1_min", -15.0), Action.submit()])
    assert state.status is SolveStatus.OPTIMAL
    assert classify_outcome(state, transport.ground_truth)[0] is OutcomeClass.FULL_SUCCESS


def test_iis_visibility(conflict):
    """Test that the IIS is hidden from the agent until GET_IIS"""
    env = DebugEnv(conflict)
    s0 = env.reset()
    assert s0.status is SolveStatus.INFEASIBLE
    assert s0.to_agent_dict()["iis_log"] == []
    assert len(s0.to_dict()["iis_log"]) == 4

    s1, _, done = env.step(s0, Action.get_iis())
    assert not done
    assert s1.step == 0
    assert s1.to_agent_dict()["iis_log"] == list(conflict.ground_truth.iis_gt.members)
    assert not s0.iis_visible   # previous state untouched


def test_diagnostics_cost_a_step_when_configured(conflict):
    """Test diagnostic_actions_free=False"""
    env = DebugEnv(conflict, EnvConfig(diagnostic_actions_free=False))
    s1, _, _ = env.step(env.reset(), Action.get_iis())
    assert s1.step == 1


def test_check_slack_and_bound(conflict):
    """Test the slack and bound diagnostics"""
    env = DebugEnv(conflict)
    s0 = env.reset()
    s1, _, _ = env.step(s0, Action.check_slack())
    assert set(s1.slack_values) == set(conflict.sabotaged.constraint_names)
    s2, _, _ = env.step(s1, Action.check_slack("c1_total"))
    assert list(s2.slack_values) == ["c1_total"]
    s3, _, _ = env.step(s2, Action.check_bound("x0"))
    assert list(s3.bound_status) == ["x0"]
    assert s3.bound_status["x0"]["lower"] == 0.0
    assert s3.step == 0


def test_invalid_action_leaves_model_unchanged(conflict):
    """Test that an unknown target is recorded and penalized without a step"""
    env = DebugEnv(conflict)
    s0 = env.reset()
    s1, reward, done = env.step(s0, Action.relax("ghost", 1.0))
    assert not done
    assert s1.code == s0.code
    assert s1.step == 0
    assert s1.history == (Action.relax("ghost", 1.0),)
    assert s1.last_error is not None
    assert reward.faithfulness_penalty == 20.0

    s2, _, _ = env.step(s1, Action.check_slack("ghost"))
    assert s2.last_error is not None
    assert s2.slack_values is None


def test_bound_row_actions(conflict):
    """Test RELAX and DROP on bound rows, and REWRITE rejection"""
    env = DebugEnv(conflict)
    s0 = env.reset()
    s1, _, _ = env.step(s0, Action.relax("x2__lb", 5.0))
    assert s1.code.variable("x2").lower == 5.0
    assert s1.step == 1
    s2, _, _ = env.step(s1, Action.drop("x0__lb"))
    assert math.isinf(s2.code.variable("x0").lower)
    s3, reward, _ = env.step(s2, Action.rewrite("x0__ub", {"x0": 1.0}, Sense.LE, 5.0))
    assert s3.last_error is not None
    assert s3.step == s2.step
    assert reward.faithfulness_penalty == 20.0


def test_restart_returns_to_sabotaged_model(conflict):
    """Test RESTART discards edits and still counts a step"""
    env = DebugEnv(conflict)
    state, _ = run_actions(env, [Action.drop("c1_total"), Action.restart()])
    assert state.code == conflict.sabotaged
    assert state.status is SolveStatus.INFEASIBLE
    assert state.step == 2
    assert len(state.history) == 2


def test_episode_over(conflict):
    """Test that stepping a finished episode raises"""
    env = DebugEnv(conflict)
    state, _ = run_actions(env, [Action.submit()])
    assert state.done
    assert state.status is SolveStatus.INFEASIBLE
    with pytest.raises(EpisodeOver) as exc_info:
        env.step(state, Action.get_iis())
    assert exc_info.value.step == 1


def test_step_limit_ends_episode(conflict):
    """Test that max_steps terminates the episode"""
    env = DebugEnv(conflict, EnvConfig(max_steps=2))
    s1, _, done1 = env.step(env.reset(), Action.relax("c2_min_0", -1.0))
    s2, _, done2 = env.step(s1, Action.relax("c2_min_0", -1.0))
    assert not done1
    assert done2
    assert s2.done


def test_total_action_cap(conflict):
    """Test that free diagnostics are still capped"""
    env = DebugEnv(conflict, EnvConfig(max_steps=1, total_action_factor=3))
    state = env.reset()
    for _ in range(3):
        state, _, done = env.step(state, Action.check_slack())
    assert done
    assert state.step == 0


def test_reset_requires_infeasible_model(conflict):
    """Test OracleDisagreement when the stored instance is not infeasible"""
    env = DebugEnv(replace(conflict, sabotaged=conflict.original))
    with pytest.raises(OracleDisagreement):
        env.reset()


def test_env_config_validation():
    """Test EnvConfig invariants"""
    from src.exceptions import InvariantError
    with pytest.raises(InvariantError):
        EnvConfig(max_steps=0)
    assert EnvConfig(max_steps=10).max_total_actions == 40


# --- reward ----------------------------------------------------------------------

def _state(conflict, status: SolveStatus, step: int) -> EpisodeState:
    return EpisodeState(problem_nl="", code=conflict.sabotaged, status=status,
                        iis_log=conflict.ground_truth.iis_gt.members, step=step)


def test_reward_full_repair(conflict):
    """Test 0.5*100 + 0.3*100 + 0.2*50*(48/50) = 89.6"""
    gt = conflict.ground_truth
    s = _state(conflict, SolveStatus.OPTIMAL, 2)
    a = Action(ActionKind.SUBMIT, diagnosis=gt.iis_gt.members)
    reward = compute_reward(s, a, replace(s, step=3), gt)
    assert reward.total == pytest.approx(89.6)
    assert reward.outcome == pytest.approx(50.0)
    assert reward.diagnosis == pytest.approx(30.0)
    assert reward.efficiency == pytest.approx(9.6)
    assert reward.faithfulness_penalty == 0.0


def test_reward_off_target_repair(conflict):
    """Test -25 + 0 + 8 - 20 = -37 for a repair outside the IIS at step 10"""
    s = _state(conflict, SolveStatus.INFEASIBLE, 10)
    a = Action.relax("unrelated_row", 1.0)
    assert is_off_target(s, a)
    reward = compute_reward(s, a, replace(s, step=11), conflict.ground_truth)
    assert reward.total == pytest.approx(-37.0)


def test_reward_first_diagnostic(conflict):
    """Test -25 + 0 + 10 = -15 for GET_IIS at step 0"""
    s = _state(conflict, SolveStatus.INFEASIBLE, 0)
    reward = compute_reward(s, Action.get_iis(), replace(s, iis_visible=True),
                            conflict.ground_truth)
    assert reward.total == pytest.approx(-15.0)


def test_repairs_after_feasibility_are_not_off_target(conflict):
    """Test that the penalty needs an infeasible model to miss"""
    s = _state(conflict, SolveStatus.OPTIMAL, 1)
    assert not is_off_target(s, Action.relax("anything", 1.0))
    assert not is_off_target(_state(conflict, SolveStatus.INFEASIBLE, 1), Action.get_iis())


def test_diagnostic_accuracy():
    """Test overlap with the ground-truth IIS"""
    assert diagnostic_accuracy(["a", "b"], ["a", "b", "c", "d"]) == 0.5
    assert diagnostic_accuracy(["a", "z"], ["a"]) == 1.0
    assert diagnostic_accuracy(["a"], []) == 0.0


def test_optimality_preservation():
    """Test OP including the zero-objective case"""
    assert optimality_preservation(100.0, 100.0) == 1.0
    assert optimality_preservation(90.0, 100.0) == pytest.approx(0.9)
    assert optimality_preservation(None, 100.0) == 0.0
    assert optimality_preservation(0.0, 0.0) == 1.0
    assert optimality_preservation(1.0, 0.0) == 0.0


def test_classify_outcome_thresholds(conflict):
    """Test Full above 0.95, Partial above 0.8, Failure otherwise"""
    gt = conflict.ground_truth
    s = _state(conflict, SolveStatus.OPTIMAL, 1)
    assert classify_outcome(replace(s, objective=104.0), gt)[0] is OutcomeClass.FULL_SUCCESS
    assert classify_outcome(replace(s, objective=110.0), gt)[0] is OutcomeClass.PARTIAL_SUCCESS
    assert classify_outcome(replace(s, objective=150.0), gt)[0] is OutcomeClass.FAILURE
    assert classify_outcome(_state(conflict, SolveStatus.INFEASIBLE, 1), gt) == \
        (OutcomeClass.FAILURE, 0.0)


# --- actions ---------------------------------------------------------------------

def test_action_dict_round_trip():
    """Test to_dict/from_dict, including case-insensitive kinds"""
    actions = [Action.get_iis(["a"]), Action.check_bound("x"), Action.relax("c", -2.5),
               Action.rewrite("c", {"x": 1.0}, Sense.GE, 3.0, ["c"]), Action.submit()]
    for a in actions:
        assert Action.from_dict(a.to_dict()) == a
    assert Action.from_dict({"kind": "drop", "target": "c"}) == Action.drop("c")


def test_action_from_dict_errors():
    """Test SchemaError on malformed actions"""
    with pytest.raises(SchemaError):
        Action.from_dict({"kind": "FLY"})
    with pytest.raises(SchemaError):
        Action.from_dict({"kind": "RELAX", "target": 3})
    with pytest.raises(SchemaError):
        Action.from_dict({"kind": "RELAX", "target": "c", "diagnosis": "c"})
    with pytest.raises(SchemaError):
        Action.from_dict(["RELAX"])


def test_action_edit_translation(conflict):
    """Test edits and actions map onto each other"""
    m = conflict.sabotaged
    assert action_to_edit(Action.relax("c3_min_1", -10.0), m) == ModelEdit.relax("c3_min_1", -10.0)
    assert action_to_edit(Action.relax("x1__lb", 2.0), m) == \
        ModelEdit.set_bound("x1", BoundSide.LOWER, 2.0)

    flip = edit_to_action(ModelEdit.flip("c2_min_0"), m)
    assert flip.kind is ActionKind.REWRITE
    assert flip.sense is Sense.LE
    assert edit_to_action(ModelEdit.set_rhs("c3_min_1", 40.0), m) == Action.relax("c3_min_1", -10.0)
    assert edit_to_action(ModelEdit.set_bound("x0", BoundSide.UPPER, math.inf), m).kind \
        is ActionKind.DROP

    with pytest.raises(InvalidAction):
        action_to_edit(Action.get_iis(), m)
    with pytest.raises(InvalidAction):
        action_to_edit(Action.relax("c3_min_1", math.nan), m)


def test_iis_failure_reads_as_error(conflict, monkeypatch):
    """Test that a failed IIS computation yields status ERROR and an empty IIS log"""
    env = DebugEnv(conflict)
    s0 = env.reset()

    def broken_iis(*args, **kwargs):
        raise SolverFailure("ERROR", "feasibility verdict", "dense-simplex", phase="iis")

    monkeypatch.setattr("src.env.environment.compute_iis", broken_iis)
    s1, _, _ = env.step(s0, Action.relax("c3_min_1", -1.0))
    assert s1.status is SolveStatus.ERROR
    assert s1.iis_log == ()
    assert s1.step == 1

    with pytest.raises(OracleDisagreement):
        DebugEnv(conflict).reset()
