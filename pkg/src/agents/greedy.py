"""
Greedy IIS agent.

Asks for the IIS and the slacks, then loosens the IIS member with the
largest violation by 10% of its right-hand side. When the least-infeasible
point shows no violated member it cycles through the members instead.
"""

import logging
from typing import Dict, List, Optional

from ..env import Action, EpisodeState
from ..lp import BoundSide, LpModel, Sense, parse_bound_row_name
from ..solver import SolveStatus, violation
from .base import Agent, EpisodeContext

logger = logging.getLogger(__name__)

RELAX_FRACTION = 0.1
MIN_RELAX_STEP = 1.0
VIOLATION_TOL = 1e-7


def loosening_delta(model: LpModel, row: str) -> Optional[float]:
    """
    Signed RELAX amount that loosens `row`, or None for an equality.

    LE rows and upper bounds move up, GE rows and lower bounds move down.
    """
    parsed = parse_bound_row_name(row)
    if parsed is not None:
        var = model.variable(parsed[0])
        current = var.lower if parsed[1] is BoundSide.LOWER else var.upper
        step = max(MIN_RELAX_STEP, RELAX_FRACTION * abs(current))
        return -step if parsed[1] is BoundSide.LOWER else step
    con = model.constraint(row)
    if con.sense is Sense.EQ:
        return None
    step = max(MIN_RELAX_STEP, RELAX_FRACTION * abs(con.rhs))
    return step if con.sense is Sense.LE else -step


class GreedyIisAgent(Agent):
    name = "greedy"

    def __init__(self):
        super().__init__()
        self._turn = 0

    def start(self, context: EpisodeContext) -> None:
        super().start(context)
        self._turn = 0

    def act(self, state: EpisodeState) -> Action:
        if state.status is not SolveStatus.INFEASIBLE:
            return Action.submit()
        if not state.iis_visible:
            return Action.get_iis()
        if state.slack_values is None:
            return Action.check_slack()

        members = [m for m in state.iis_log if state.code.has_row(m)]
        if not members:
            return Action.submit()
        relaxable = [m for m in members if loosening_delta(state.code, m) is not None]
        if not relaxable:
            # only equalities left in the core
            return Action.drop(members[0], diagnosis=members)

        target = self._most_violated(relaxable, state.slack_values)
        if target is None:
            target = relaxable[self._turn % len(relaxable)]
            self._turn += 1
        delta = loosening_delta(state.code, target)
        logger.debug("greedy relax %s by %+g", target, delta)
        return Action.relax(target, delta, diagnosis=members)

    @staticmethod
    def _most_violated(members: List[str], slacks: Dict[str, float]) -> Optional[str]:
        best, best_violation = None, VIOLATION_TOL
        for name in members:
            v = violation(slacks.get(name, 0.0))
            if v > best_violation:
                best, best_violation = name, v
        return best
