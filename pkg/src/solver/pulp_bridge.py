"""
PuLP bridge: build a pulp.LpProblem from an LpModel.

Used to cross-check statuses and objectives against CBC and to export
models in LP format for inspection.
"""

import math
from typing import Optional, Tuple

import pulp

from ..lp import LpModel, ObjectiveSense, Sense
from .solve import SolveStatus

_STATUS_MAP = {
    pulp.LpStatusOptimal: SolveStatus.OPTIMAL,
    pulp.LpStatusInfeasible: SolveStatus.INFEASIBLE,
    pulp.LpStatusUnbounded: SolveStatus.UNBOUNDED,
}


def get_solver(time_limit: Optional[float] = None):
    """Silent CBC, the open-source solver PuLP ships with."""
    return pulp.PULP_CBC_CMD(msg=0, timeLimit=time_limit)


def cbc_available() -> bool:
    try:
        return bool(pulp.PULP_CBC_CMD(msg=0).available())
    except Exception:
        return False


def to_pulp(m: LpModel, name: str = "model") -> Tuple[pulp.LpProblem, dict]:
    """Return the PuLP problem and a map from variable name to pulp variable."""
    sense = pulp.LpMinimize if m.objective_sense is ObjectiveSense.MIN else pulp.LpMaximize
    prob = pulp.LpProblem(name, sense)
    pvars = {}
    for i, var in enumerate(m.variables):
        pvars[var.name] = pulp.LpVariable(
            f"v{i}",
            lowBound=var.lower if math.isfinite(var.lower) else None,
            upBound=var.upper if math.isfinite(var.upper) else None,
        )
    prob += pulp.lpSum(var.obj_coeff * pvars[var.name] for var in m.variables)
    for j, con in enumerate(m.constraints):
        expr = pulp.lpSum(coef * pvars[v] for v, coef in con.terms.items())
        if con.sense is Sense.LE:
            prob += (expr <= con.rhs), f"c{j}"
        elif con.sense is Sense.GE:
            prob += (expr >= con.rhs), f"c{j}"
        else:
            prob += (expr == con.rhs), f"c{j}"
    return prob, pvars


def solve_with_pulp(m: LpModel, solver=None) -> Tuple[SolveStatus, Optional[float]]:
    """Solve with PuLP and map the status onto SolveStatus."""
    prob, _ = to_pulp(m)
    prob.solve(solver or get_solver())
    status = _STATUS_MAP.get(prob.status, SolveStatus.ERROR)
    objective = pulp.value(prob.objective) if status is SolveStatus.OPTIMAL else None
    if objective is None and status is SolveStatus.OPTIMAL:
        objective = 0.0
    return status, objective


def write_lp(m: LpModel, path: str):
    prob, _ = to_pulp(m)
    prob.writeLP(path)
