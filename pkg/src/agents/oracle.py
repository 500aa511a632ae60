"""Oracle agent: replays the ground-truth repair."""

from typing import List

from ..env import Action, EpisodeState, edit_to_action
from ..lp import apply_edit
from ..saboteur import BenchmarkInstance
from .base import Agent, EpisodeContext


def oracle_plan(instance: BenchmarkInstance) -> List[Action]:
    """
    GET_IIS carrying the diagnosis, one action per ground-truth edit
    (cascade edits included, in order), then SUBMIT.

    The diagnosis lists the key constraints first and then the remaining
    ground-truth IIS members. Edits are translated against the model as
    it stands after the preceding edits.
    """
    gt = instance.ground_truth
    diagnosis = list(gt.key_constraints)
    diagnosis += [name for name in gt.iis_gt.members if name not in diagnosis]

    plan = [Action.get_iis(diagnosis)]
    model = instance.sabotaged
    for edit in instance.all_fixes():
        plan.append(edit_to_action(edit, model))
        model = apply_edit(model, edit)
    plan.append(Action.submit())
    return plan


class OracleAgent(Agent):
    name = "oracle"

    def __init__(self):
        super().__init__()
        self._plan: List[Action] = []
        self._cursor = 0

    def start(self, context: EpisodeContext) -> None:
        super().start(context)
        self._plan = oracle_plan(context.instance)
        self._cursor = 0

    def act(self, state: EpisodeState) -> Action:
        if self._cursor >= len(self._plan):
            return Action.submit()
        action = self._plan[self._cursor]
        self._cursor += 1
        return action
