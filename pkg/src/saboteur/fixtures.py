"""
Hand-built reference instances.

production_conflict: three products whose minimums (60 + 50) exceed a
100-unit capacity; the intended minimum for product 1 was 40.

transport_overallocation: four demands (30, 35, 25, 25) against three
warehouses holding 100 units in total; demand 1 was meant to be 20.
"""

from dataclasses import replace
from typing import List

from ..lp import Constraint, LpModel, ModelEdit, ObjectiveSense, Sense, Variable
from ..solver import DEFAULT_CONFIG, SolverConfig, compute_iis, solve
from .benchmark import assign_difficulty
from .error_types import Difficulty, ErrorType
from .instance import BenchmarkInstance, GroundTruth


def _minimize_total(variables: List[str]) -> List[Variable]:
    return [Variable(v, 0.0, float("inf"), 1.0) for v in variables]


def _build(inst_id: str, error_type: ErrorType, original: LpModel, sabotaged: LpModel,
           key: str, fix: ModelEdit, config: SolverConfig) -> BenchmarkInstance:
    base = solve(original, config)
    iis = compute_iis(sabotaged, config)
    truth = GroundTruth((key,), (fix,), iis, base.objective)
    inst = BenchmarkInstance(inst_id, error_type, original, sabotaged, truth, Difficulty.EASY)
    return replace(inst, difficulty=assign_difficulty(inst))


def production_conflict(config: SolverConfig = DEFAULT_CONFIG) -> BenchmarkInstance:
    variables = _minimize_total(["x0", "x1", "x2"])

    def model(min_1: float) -> LpModel:
        return LpModel(ObjectiveSense.MIN, tuple(variables), (
            Constraint("c1_total", {"x0": 1.0, "x1": 1.0, "x2": 1.0}, Sense.LE, 100.0),
            Constraint("c2_min_0", {"x0": 1.0}, Sense.GE, 60.0),
            Constraint("c3_min_1", {"x1": 1.0}, Sense.GE, min_1),
            Constraint("c4_min_2", {"x2": 1.0}, Sense.GE, 0.0),
        ), "A production plan for three products shares a 100-unit capacity. Product 0 "
           "needs at least 60 units and product 1 at least 50 units. Minimize total output.")

    return _build("fixture_production_conflict", ErrorType.C, model(40.0), model(50.0),
                  "c3_min_1", ModelEdit.relax("c3_min_1", -10.0), config)


def transport_overallocation(config: SolverConfig = DEFAULT_CONFIG) -> BenchmarkInstance:
    supply = [f"s{i}" for i in range(3)]
    demand = [f"d{j}" for j in range(4)]
    variables = _minimize_total(supply + demand)
    caps = (40.0, 35.0, 25.0)

    def model(d1: float) -> LpModel:
        rows = [Constraint(f"s{i}_cap", {f"s{i}": 1.0}, Sense.LE, cap) for i, cap in enumerate(caps)]
        rows += [Constraint(f"d{j}_min", {f"d{j}": 1.0}, Sense.GE, need)
                 for j, need in enumerate((30.0, d1, 25.0, 25.0))]
        balance = {**{s: 1.0 for s in supply}, **{d: -1.0 for d in demand}}
        rows.append(Constraint("flow_balance", balance, Sense.EQ, 0.0))
        return LpModel(ObjectiveSense.MIN, tuple(variables), tuple(rows),
                       "Three warehouses with capacities 40, 35 and 25 serve four customers "
                       "demanding 30, 35, 25 and 25 units. Shipments out must equal "
                       "deliveries in. Minimize total volume handled.")

    return _build("fixture_transport_overallocation", ErrorType.E, model(20.0), model(35.0),
                  "d1_min", ModelEdit.relax("d1_min", -15.0), config)


def all_fixtures(config: SolverConfig = DEFAULT_CONFIG) -> List[BenchmarkInstance]:
    return [production_conflict(config), transport_overallocation(config)]
