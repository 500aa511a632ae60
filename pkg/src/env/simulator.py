"""
Offline tool-result simulator.

Estimates the effect of an action from the ground truth alone, without
calling the solver. The model in the state is never edited; only status,
IIS and counters move.
"""

from dataclasses import replace

import numpy as np

from ..saboteur import GroundTruth
from ..solver import SolveStatus
from .actions import Action, ActionKind
from .state import EpisodeState

KEY_RELAX_SUCCESS = 0.9
KEY_DROP_SUCCESS = 0.7
IIS_MEMBER_SHRINK = 0.5


def simulate_step(a: Action, s: EpisodeState, gt: GroundTruth,
                  rng: np.random.Generator) -> EpisodeState:
    """
    Simulated next state.

    Diagnostic actions return s itself. A repair on a key constraint
    succeeds with probability 0.9 (RELAX, REWRITE) or 0.7 (DROP); a repair
    on another ground-truth IIS member removes one IIS entry with
    probability 0.5; anything else leaves the model INFEASIBLE.
    """
    if a.kind.is_diagnostic:
        return s

    nxt = replace(s, history=s.history + (a,), step=s.step + 1,
                  total_actions=s.total_actions + 1,
                  diagnosed=s.diagnosed | frozenset(a.diagnosis))
    if a.kind is ActionKind.SUBMIT:
        return replace(nxt, done=True)
    if not a.kind.is_repair:
        return nxt

    if a.target in gt.key_constraints:
        p = KEY_DROP_SUCCESS if a.kind is ActionKind.DROP else KEY_RELAX_SUCCESS
        if rng.random() < p:
            return replace(nxt, status=SolveStatus.OPTIMAL, iis_log=(),
                           objective=gt.original_objective)
        return replace(nxt, status=SolveStatus.INFEASIBLE)
    if a.target in gt.iis_gt:
        if rng.random() < IIS_MEMBER_SHRINK and s.iis_log:
            members = list(s.iis_log)
            members.remove(a.target if a.target in members else members[-1])
            return replace(nxt, status=SolveStatus.INFEASIBLE, iis_log=tuple(members))
        return replace(nxt, status=SolveStatus.INFEASIBLE)
    return replace(nxt, status=SolveStatus.INFEASIBLE)
