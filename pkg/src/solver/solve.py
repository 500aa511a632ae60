"""
Solve entry point: status, primal point, slacks and duals for an LpModel.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..exceptions import InvariantError, SolverFailure, UnknownVariable
from ..lp import LpModel, ObjectiveSense, Sense
from .simplex import DenseSimplex, SimplexIterationLimit, SimplexTimeout, StandardForm

logger = logging.getLogger(__name__)

SOLVER_NAME = "dense-simplex"


class SolveStatus(str, Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    ERROR = "ERROR"


@dataclass(frozen=True)
class SolverConfig:
    """
    Solver parameters.

    threads is accepted for parity with commercial solver configs and
    ignored: the simplex is single-threaded.
    """
    timeout: float = 10.0
    feasibility_tol: float = 1e-7
    optimality_tol: float = 1e-9
    pivot_tol: float = 1e-9
    max_iterations: int = 10000
    threads: int = 1

    def __post_init__(self):
        if self.timeout <= 0:
            raise InvariantError("timeout must be positive", timeout=self.timeout)
        if self.feasibility_tol <= 0 or self.optimality_tol <= 0 or self.pivot_tol <= 0:
            raise InvariantError("tolerances must be positive")
        if self.max_iterations < 1:
            raise InvariantError("max_iterations must be >= 1")

    def to_dict(self) -> Dict[str, float]:
        return {
            "timeout": self.timeout,
            "feasibility_tol": self.feasibility_tol,
            "optimality_tol": self.optimality_tol,
            "pivot_tol": self.pivot_tol,
            "max_iterations": self.max_iterations,
        }


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class SolveResult:
    """
    Outcome of one solve.

    objective is set only when OPTIMAL. For INFEASIBLE models, primal is
    the phase-1 point (least total infeasibility over the artificial rows)
    so that slacks still show which rows are violated.
    """
    status: SolveStatus
    objective: Optional[float] = None
    primal: Mapping[str, float] = field(default_factory=dict)
    slacks: Mapping[str, float] = field(default_factory=dict)
    duals: Mapping[str, float] = field(default_factory=dict)
    iterations: int = 0
    message: Optional[str] = None

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    def to_dict(self):
        return {
            "status": self.status.value,
            "objective": self.objective,
            "primal": dict(self.primal),
            "slacks": dict(self.slacks),
            "duals": dict(self.duals),
            "iterations": self.iterations,
            "message": self.message,
        }


def constraint_slacks(m: LpModel, primal: Mapping[str, float]) -> Dict[str, float]:
    """
    Slack per constraint.

    LE: rhs - activity; GE: activity - rhs; EQ: -|activity - rhs|. A value
    below zero is a violation of that magnitude, so for every sense
    "satisfied" means slack >= -tol.

    Raises:
        UnknownVariable: primal has no value for a referenced variable
    """
    slacks: Dict[str, float] = {}
    for con in m.constraints:
        for var in con.terms:
            if var not in primal:
                raise UnknownVariable(var)
        act = con.activity(primal)
        if con.sense is Sense.LE:
            slacks[con.name] = con.rhs - act
        elif con.sense is Sense.GE:
            slacks[con.name] = act - con.rhs
        else:
            slacks[con.name] = -abs(act - con.rhs)
    return slacks


def violation(slack: float) -> float:
    """Violation magnitude of a slack value (0 when satisfied)."""
    return max(0.0, -slack)


def _clean(x: float) -> float:
    # canonical zero so results serialize identically
    return 0.0 if x == 0.0 else float(x)


def solve(m: LpModel, config: SolverConfig = DEFAULT_CONFIG,
          phase_one_only: bool = False) -> SolveResult:
    """
    Solve m with the dense two-phase simplex.

    Never raises on solver trouble: timeouts, iteration limits and numerical
    breakdown come back as status ERROR with a message.

    With phase_one_only, an OPTIMAL status means "feasible" and no objective,
    slacks or duals are produced.
    """
    deadline = time.monotonic() + config.timeout
    engine = DenseSimplex(config.feasibility_tol, config.optimality_tol,
                          config.pivot_tol, config.max_iterations, deadline)
    try:
        sf = StandardForm.from_model(m)
        with np.errstate(divide="raise", over="raise", invalid="raise"):
            outcome = engine.solve(sf, phase_one_only=phase_one_only)
    except SimplexTimeout:
        logger.warning("solve timed out after %.1fs", config.timeout)
        return SolveResult(SolveStatus.ERROR, iterations=engine.iterations, message="timeout")
    except SimplexIterationLimit:
        return SolveResult(SolveStatus.ERROR, iterations=engine.iterations,
                           message="iteration limit")
    except (FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        logger.warning("numerical breakdown: %s", exc)
        return SolveResult(SolveStatus.ERROR, iterations=engine.iterations,
                           message=f"numerical breakdown: {exc}")

    names = list(m.variable_names)
    primal = {k: _clean(v) for k, v in sf.model_values(outcome.y, names).items()}
    status = SolveStatus(outcome.status)
    if phase_one_only:
        return SolveResult(status, primal=primal, iterations=outcome.iterations)

    slacks = {k: _clean(v) for k, v in constraint_slacks(m, primal).items()}
    if status is not SolveStatus.OPTIMAL:
        return SolveResult(status, primal=primal, slacks=slacks, iterations=outcome.iterations)

    sign = 1.0 if m.objective_sense is ObjectiveSense.MIN else -1.0
    duals = {}
    for r, owner in enumerate(sf.row_owner):
        if owner is not None:
            duals[m.constraints[owner].name] = _clean(sign * outcome.row_duals[r])
    objective = _clean(m.objective_value(primal))
    return SolveResult(status, objective, primal, slacks, duals, outcome.iterations)


def is_feasible(m: LpModel, config: SolverConfig = DEFAULT_CONFIG) -> Optional[bool]:
    """Phase-1 feasibility test; None when the solver errored."""
    result = solve(m, config, phase_one_only=True)
    if result.status is SolveStatus.ERROR:
        return None
    return result.status is not SolveStatus.INFEASIBLE


def implied_range(m: LpModel, expression: Mapping[str, float],
                  config: SolverConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """
    Minimum and maximum of a linear expression over the feasible region of m.

    Unbounded directions come back as -inf/+inf.

    Raises:
        SolverFailure: m is infeasible or a solve errored
    """
    bounds = []
    for sense in (ObjectiveSense.MIN, ObjectiveSense.MAX):
        result = solve(m.with_objective(expression, sense), config)
        if result.status is SolveStatus.UNBOUNDED:
            bounds.append(-math.inf if sense is ObjectiveSense.MIN else math.inf)
        elif result.status is SolveStatus.OPTIMAL:
            bounds.append(result.objective)
        else:
            raise SolverFailure(result.status.value, SolveStatus.OPTIMAL.value,
                                SOLVER_NAME, phase="implied_range", model=m)
    return bounds[0], bounds[1]
