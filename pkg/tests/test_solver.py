"""
Tests for the simplex solver, slacks and IIS computation.

The IIS checks run against an independent oracle: every reported member
set must be infeasible on its own and feasible after removing any single
member.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math
from dataclasses import replace

import numpy as np
import pytest

from src.exceptions import NotInfeasible
from src.lp import Constraint, LpModel, ObjectiveSense, Sense, Variable
from src.solver import (SolveStatus, SolverConfig, compute_iis, constraint_slacks, implied_range,
                        is_feasible, is_infeasible_subsystem, solve, violation)
from src.solver.pulp_bridge import cbc_available, solve_with_pulp, write_lp


def diet_model(need: float = 4.0) -> LpModel:
    return LpModel(ObjectiveSense.MIN, (
        Variable("x", 0.0, 3.0, 1.0),
        Variable("y", 0.0, math.inf, 2.0),
    ), (
        Constraint("need", {"x": 1.0, "y": 1.0}, Sense.GE, need),
        Constraint("cap", {"x": 1.0, "y": 1.0}, Sense.LE, 10.0),
    ))


def test_solve_optimal():
    """Test a small LP with a known optimum"""
    result = solve(diet_model())
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(5.0)
    assert result.primal["x"] == pytest.approx(3.0)
    assert result.primal["y"] == pytest.approx(1.0)
    assert result.slacks["need"] == pytest.approx(0.0, abs=1e-9)
    assert result.slacks["cap"] == pytest.approx(6.0)


def test_solve_maximize():
    """Test MAX sense"""
    m = LpModel(ObjectiveSense.MAX, (Variable("x", 0.0, 7.0, 2.0),), (
        Constraint("c", {"x": 1.0}, Sense.LE, 5.0),
    ))
    result = solve(m)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(10.0)


def test_solve_infeasible_and_unbounded():
    """Test INFEASIBLE and UNBOUNDED detection"""
    infeasible = solve(diet_model(need=20.0))
    assert infeasible.status is SolveStatus.INFEASIBLE
    assert infeasible.objective is None
    assert set(infeasible.primal) == {"x", "y"}   # phase-1 point is reported

    unbounded = LpModel(ObjectiveSense.MAX, (Variable("x", 0.0, math.inf, 1.0),))
    assert solve(unbounded).status is SolveStatus.UNBOUNDED


def test_solve_equality_and_free_variables():
    """Test equality rows and variables with negative ranges"""
    m = LpModel(ObjectiveSense.MIN, (
        Variable("a", -math.inf, math.inf, 1.0),
        Variable("b", -5.0, 5.0, 0.0),
    ), (
        Constraint("sum", {"a": 1.0, "b": 1.0}, Sense.EQ, -2.0),
        Constraint("floor", {"a": 1.0}, Sense.GE, -4.0),
    ))
    result = solve(m)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(-4.0)
    assert result.primal["b"] == pytest.approx(2.0)


def test_solver_errors_are_statuses():
    """Test that an iteration limit comes back as ERROR instead of raising"""
    result = solve(diet_model(), SolverConfig(max_iterations=1))
    assert result.status is SolveStatus.ERROR
    assert result.message == "iteration limit"


def test_constraint_slacks_and_violation():
    """Test slack signs for each sense"""
    m = LpModel(ObjectiveSense.MIN, (Variable("x"),), (
        Constraint("le", {"x": 1.0}, Sense.LE, 2.0),
        Constraint("ge", {"x": 1.0}, Sense.GE, 5.0),
        Constraint("eq", {"x": 1.0}, Sense.EQ, 4.0),
    ))
    slacks = constraint_slacks(m, {"x": 3.0})
    assert slacks == {"le": -1.0, "ge": -2.0, "eq": -1.0}
    assert violation(slacks["ge"]) == 2.0
    assert violation(0.5) == 0.0


def test_implied_range():
    """Test min/max of an expression over the feasible region"""
    lo, hi = implied_range(diet_model(), {"x": 1.0})
    assert lo == pytest.approx(0.0)
    assert hi == pytest.approx(3.0)
    lo, hi = implied_range(diet_model(), {"y": 1.0})
    assert lo == pytest.approx(1.0)
    assert hi == pytest.approx(10.0)


def test_iis_of_simple_conflict():
    """Test IIS of two directly contradicting rows"""
    iis = compute_iis(diet_model(need=20.0))
    assert iis.members == ("need", "cap")
    assert iis.bound_members == ()
    assert "need" in iis
    assert is_infeasible_subsystem(diet_model(need=20.0), iis.members)


def test_iis_includes_bound_rows():
    """Test that variable bounds are reported as <var>__lb / <var>__ub members"""
    m = LpModel(ObjectiveSense.MIN, (Variable("x", 0.0, 3.0, 1.0),), (
        Constraint("big", {"x": 1.0}, Sense.GE, 5.0),
    ))
    iis = compute_iis(m)
    assert iis.members == ("big", "x__ub")
    assert iis.constraint_members == ("big",)
    assert iis.bound_members == ("x__ub",)


def test_iis_rejects_feasible_model():
    """Test NotInfeasible on a feasible model"""
    with pytest.raises(NotInfeasible) as exc_info:
        compute_iis(diet_model())
    assert exc_info.value.status == "OPTIMAL"


def random_lp(rng: np.random.Generator) -> LpModel:
    n = int(rng.integers(2, 4))
    variables = [Variable(f"x{i}", 0.0, float(rng.integers(3, 8)), float(rng.integers(-2, 3)))
                 for i in range(n)]
    constraints = []
    for j in range(int(rng.integers(2, 5))):
        terms = {f"x{i}": float(rng.integers(-2, 4)) for i in range(n)}
        terms = {k: v for k, v in terms.items() if v != 0.0} or {"x0": 1.0}
        sense = (Sense.LE, Sense.GE, Sense.EQ)[int(rng.integers(3))]
        constraints.append(Constraint(f"r{j}", terms, sense, float(rng.integers(-6, 20))))
    return LpModel(ObjectiveSense.MIN, tuple(variables), tuple(constraints))


def infeasible_lps(count: int, seed: int):
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(200 * count):
        m = random_lp(rng)
        if solve(m).status is SolveStatus.INFEASIBLE:
            found.append(m)
            if len(found) == count:
                break
    return found


def test_iis_is_irreducible_on_random_lps():
    """Test IIS minimality against the subset oracle on 500 random infeasible LPs"""
    models = infeasible_lps(500, seed=11)
    assert len(models) == 500
    for m in models:
        iis = compute_iis(m)
        assert iis.size > 0
        assert is_infeasible_subsystem(m, iis.members)
        for dropped in iis.members:
            rest = [name for name in iis.members if name != dropped]
            assert not is_infeasible_subsystem(m, rest), (m, iis.members, dropped)


def test_dropping_iis_rows_until_feasible():
    """Test that removing IIS rows round by round ends in a model that is not infeasible"""
    for m in infeasible_lps(100, seed=13):
        current = m.expand_bounds()
        for _ in range(len(current.constraints)):
            if solve(current).status is not SolveStatus.INFEASIBLE:
                break
            iis = compute_iis(current)
            assert iis.size > 0
            assert set(iis.members) <= set(current.constraint_names)
            current = current.with_constraints(c for c in current.constraints
                                               if c.name not in iis)
        assert solve(current).status is not SolveStatus.INFEASIBLE, m


def feasible_lps(count: int, seed: int, sense: ObjectiveSense):
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(50 * count):
        m = replace(random_lp(rng), objective_sense=sense)
        result = solve(m)
        if result.status is SolveStatus.OPTIMAL:
            found.append((m, result))
            if len(found) == count:
                break
    return found


@pytest.mark.parametrize("sense", [ObjectiveSense.MIN, ObjectiveSense.MAX])
def test_strong_duality_on_random_lps(sense):
    """Test objective == sum of dual * rhs over constraint and bound rows"""
    cases = feasible_lps(100, seed=17, sense=sense)
    assert len(cases) == 100
    for m, result in cases:
        expanded = m.expand_bounds()
        full = solve(expanded)
        assert full.status is SolveStatus.OPTIMAL
        assert full.objective == pytest.approx(result.objective, rel=1e-6, abs=1e-6)
        dual_objective = sum(full.duals[c.name] * c.rhs for c in expanded.constraints)
        assert dual_objective == pytest.approx(full.objective, rel=1e-6, abs=1e-6), m


def test_iis_is_deterministic():
    """Test that the same model always yields the same IIS"""
    for m in infeasible_lps(20, seed=3):
        assert compute_iis(m) == compute_iis(m)


def test_is_feasible_matches_solve():
    """Test the phase-1 verdict against the full solve"""
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = random_lp(rng)
        status = solve(m).status
        assert is_feasible(m) == (status is not SolveStatus.INFEASIBLE)


@pytest.mark.skipif(not cbc_available(), reason="CBC not available")
def test_statuses_agree_with_cbc():
    """Test status and objective agreement with PuLP/CBC on random LPs"""
    rng = np.random.default_rng(17)
    for _ in range(50):
        m = random_lp(rng)
        ours = solve(m)
        status, objective = solve_with_pulp(m)
        assert ours.status is status
        if status is SolveStatus.OPTIMAL:
            assert ours.objective == pytest.approx(objective, abs=1e-6)


def test_write_lp(tmp_path):
    """Test LP-file export"""
    path = tmp_path / "diet.lp"
    write_lp(diet_model(), str(path))
    text = path.read_text()
    assert "Minimize" in text or "MINIMIZE" in text
