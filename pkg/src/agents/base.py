"""Base agent class and the per-episode context handed to agents."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List

import numpy as np

from ..env import Action, ActionKind, EpisodeState
from ..saboteur import BenchmarkInstance

ALLOWED_ACTIONS: List[str] = [kind.value for kind in ActionKind]


@dataclass
class EpisodeContext:
    """
    What an agent is told when an episode starts.

    instance is the full benchmark record; only evaluation-side agents
    (the oracle) may look at its ground truth.
    """
    instance: BenchmarkInstance
    episode_id: str
    attempt: int
    rng: np.random.Generator


class Agent(ABC):
    """
    Base class for debugging agents.

    The evaluation loop calls start() once per episode, act() once per
    state until the episode ends, then finish(). close() releases any
    resources held across episodes.
    """

    name = "agent"

    def __init__(self):
        self.context: EpisodeContext = None

    def start(self, context: EpisodeContext) -> None:
        self.context = context

    @abstractmethod
    def act(self, state: EpisodeState) -> Action:
        """Return the next action for the given state."""
        pass

    def finish(self, state: EpisodeState) -> None:
        pass

    def close(self) -> None:
        pass
