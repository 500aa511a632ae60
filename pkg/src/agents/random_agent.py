"""Random baseline agent."""

from ..env import Action, EpisodeState
from .base import Agent

SUBMIT_PROBABILITY = 0.05
DIAGNOSTIC_PROBABILITY = 0.3
DROP_PROBABILITY = 0.3
MAX_RELAX = 10.0


class RandomAgent(Agent):
    """
    Picks diagnostics, RELAX and DROP uniformly over the current
    constraints, and submits with a small fixed probability.
    """

    name = "random"

    def act(self, state: EpisodeState) -> Action:
        rng = self.context.rng
        names = state.code.constraint_names
        if not names or rng.random() < SUBMIT_PROBABILITY:
            return Action.submit()

        if rng.random() < DIAGNOSTIC_PROBABILITY:
            choice = int(rng.integers(3))
            if choice == 0:
                return Action.get_iis(diagnosis=[names[int(rng.integers(len(names)))]])
            if choice == 1:
                return Action.check_slack()
            return Action.check_bound()

        target = names[int(rng.integers(len(names)))]
        if rng.random() < DROP_PROBABILITY:
            return Action.drop(target)
        delta = float(rng.uniform(-MAX_RELAX, MAX_RELAX))
        return Action.relax(target, delta)
