"""
Tests for the offline tool-result simulator.

Branch probabilities are checked over 10,000 seeded trials; each observed
rate must lie within three standard deviations of its nominal value.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math

import numpy as np
import pytest

from src.env import Action, DebugEnv, simulate_step
from src.saboteur.fixtures import production_conflict
from src.solver import SolveStatus

TRIALS = 10_000


@pytest.fixture(scope="module")
def setup():
    inst = production_conflict()
    return DebugEnv(inst).reset(), inst.ground_truth


def within_three_sigma(hits: int, p: float) -> bool:
    sigma = math.sqrt(TRIALS * p * (1.0 - p))
    return abs(hits - TRIALS * p) <= 3.0 * sigma


def test_key_relax_succeeds_ninety_percent(setup):
    """Test RELAX on the key constraint reaches OPTIMAL with p = 0.9"""
    s, gt = setup
    rng = np.random.default_rng(1)
    action = Action.relax("c3_min_1", -10.0)
    hits = sum(simulate_step(action, s, gt, rng).status is SolveStatus.OPTIMAL
               for _ in range(TRIALS))
    assert within_three_sigma(hits, 0.9)


def test_key_rewrite_matches_relax(setup):
    """Test REWRITE on the key constraint uses the same probability as RELAX"""
    s, gt = setup
    rng = np.random.default_rng(2)
    action = Action.rewrite("c3_min_1", {"x1": 1.0}, "GE", 40.0)
    hits = sum(simulate_step(action, s, gt, rng).status is SolveStatus.OPTIMAL
               for _ in range(TRIALS))
    assert within_three_sigma(hits, 0.9)


def test_key_drop_succeeds_seventy_percent(setup):
    """Test DROP on the key constraint reaches OPTIMAL with p = 0.7"""
    s, gt = setup
    rng = np.random.default_rng(3)
    hits = sum(simulate_step(Action.drop("c3_min_1"), s, gt, rng).status is SolveStatus.OPTIMAL
               for _ in range(TRIALS))
    assert within_three_sigma(hits, 0.7)


def test_iis_member_shrinks_half_the_time(setup):
    """Test a repair on a non-key IIS member shrinks the IIS with p = 0.5"""
    s, gt = setup
    rng = np.random.default_rng(4)
    hits = 0
    for _ in range(TRIALS):
        nxt = simulate_step(Action.relax("c1_total", 10.0), s, gt, rng)
        assert nxt.status is SolveStatus.INFEASIBLE
        if len(nxt.iis_log) == len(s.iis_log) - 1:
            assert "c1_total" not in nxt.iis_log
            hits += 1
    assert within_three_sigma(hits, 0.5)


def test_off_target_repair_stays_infeasible(setup):
    """Test a repair outside the IIS never changes the outcome"""
    s, gt = setup
    rng = np.random.default_rng(5)
    for _ in range(1000):
        nxt = simulate_step(Action.relax("elsewhere", 1.0), s, gt, rng)
        assert nxt.status is SolveStatus.INFEASIBLE
        assert nxt.iis_log == s.iis_log


def test_counters_and_model(setup):
    """Test that the model is never edited and counters move"""
    s, gt = setup
    nxt = simulate_step(Action.relax("c3_min_1", -10.0), s, gt, np.random.default_rng(0))
    assert nxt.code is s.code
    assert nxt.step == s.step + 1
    assert nxt.total_actions == s.total_actions + 1
    assert len(nxt.history) == 1
    if nxt.status is SolveStatus.OPTIMAL:
        assert nxt.objective == gt.original_objective
        assert nxt.iis_log == ()


def test_diagnostics_and_submit(setup):
    """Test diagnostic actions return the state itself and SUBMIT ends the episode"""
    s, gt = setup
    rng = np.random.default_rng(0)
    assert simulate_step(Action.get_iis(), s, gt, rng) is s
    assert simulate_step(Action.check_slack(), s, gt, rng) is s
    submitted = simulate_step(Action.submit(), s, gt, rng)
    assert submitted.done
    assert submitted.status is s.status


def test_simulation_is_reproducible(setup):
    """Test that equal seeds give equal trajectories"""
    s, gt = setup

    def run(seed):
        rng = np.random.default_rng(seed)
        return [simulate_step(Action.drop("c3_min_1"), s, gt, rng).status for _ in range(100)]

    assert run(9) == run(9)
