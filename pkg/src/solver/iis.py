"""
Irreducible infeasible subsystem (IIS) by deletion filtering.

Variable bounds take part as rows named <var>__lb / <var>__ub. Rows are
visited in a fixed order (model constraints, then bound rows in variable
order); a row is deleted for good when the remaining rows stay infeasible.
What survives is infeasible, and dropping any single survivor makes it
feasible.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from ..exceptions import NotInfeasible, SolverFailure
from ..lp import LpModel, parse_bound_row_name
from .solve import DEFAULT_CONFIG, SOLVER_NAME, SolveStatus, SolverConfig, is_feasible, solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IisReport:
    """Members of an IIS in deletion-filter order."""
    members: Tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def constraint_members(self) -> Tuple[str, ...]:
        return tuple(m for m in self.members if parse_bound_row_name(m) is None)

    @property
    def bound_members(self) -> Tuple[str, ...]:
        return tuple(m for m in self.members if parse_bound_row_name(m) is not None)

    def __contains__(self, name: str) -> bool:
        return name in self.members

    def to_list(self) -> List[str]:
        return list(self.members)


def subsystem(m: LpModel, names: Iterable[str]) -> LpModel:
    """Model with only the named rows (constraints and bound rows); all variables free."""
    wanted = set(names)
    expanded = m.expand_bounds()
    return expanded.with_constraints(c for c in expanded.constraints if c.name in wanted)


def is_infeasible_subsystem(m: LpModel, names: Iterable[str],
                            config: SolverConfig = DEFAULT_CONFIG) -> bool:
    feasible = is_feasible(subsystem(m, names), config)
    if feasible is None:
        raise SolverFailure(SolveStatus.ERROR.value, "feasibility verdict", SOLVER_NAME,
                            phase="iis", model=m)
    return not feasible


def compute_iis(m: LpModel, config: SolverConfig = DEFAULT_CONFIG,
                status: Optional[SolveStatus] = None) -> IisReport:
    """
    Compute an IIS of an infeasible model.

    Args:
        m: Model to analyze
        config: Solver configuration for the feasibility checks
        status: Known status of m; skips the initial solve when given

    Raises:
        NotInfeasible: m is feasible or unbounded
        SolverFailure: a feasibility check errored
    """
    if status is None:
        status = solve(m, config).status
    if status is not SolveStatus.INFEASIBLE:
        raise NotInfeasible(status.value)

    expanded = m.expand_bounds()
    active = list(expanded.constraints)
    i = 0
    checks = 0
    while i < len(active):
        trial = active[:i] + active[i + 1:]
        checks += 1
        verdict = is_feasible(expanded.with_constraints(trial), config)
        if verdict is None:
            raise SolverFailure(SolveStatus.ERROR.value, "feasibility verdict", SOLVER_NAME,
                                phase="iis", model=m)
        if not verdict:
            active = trial
        else:
            i += 1
    report = IisReport(tuple(c.name for c in active))
    logger.debug("IIS of size %d after %d checks: %s", report.size, checks, report.members)
    return report
