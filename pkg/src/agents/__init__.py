"""
Debugging agents: the ground-truth oracle, greedy and random baselines,
and a subprocess bridge for external agents.
"""

from .base import ALLOWED_ACTIONS, Agent, EpisodeContext
from .oracle import OracleAgent, oracle_plan
from .greedy import GreedyIisAgent, loosening_delta
from .random_agent import RandomAgent
from .external import DEFAULT_TIMEOUT, ExternalAgent, parse_reply

from ..exceptions import InvariantError

BUILTIN_AGENTS = {
    OracleAgent.name: OracleAgent,
    GreedyIisAgent.name: GreedyIisAgent,
    RandomAgent.name: RandomAgent,
}
EXTERNAL_PREFIX = "cmd:"


def build_agent(spec: str, timeout: float = DEFAULT_TIMEOUT) -> Agent:
    """
    Agent from a command-line spec: a built-in name or "cmd:<command line>".

    Raises:
        InvariantError: unknown agent name or empty command
    """
    if spec.startswith(EXTERNAL_PREFIX):
        command = spec[len(EXTERNAL_PREFIX):].strip()
        if not command:
            raise InvariantError("External agent needs a command", agent=spec)
        return ExternalAgent(command, timeout=timeout)
    if spec not in BUILTIN_AGENTS:
        raise InvariantError("Unknown agent", agent=spec, choices=sorted(BUILTIN_AGENTS))
    return BUILTIN_AGENTS[spec]()


__all__ = [
    'ALLOWED_ACTIONS', 'Agent', 'EpisodeContext',
    'OracleAgent', 'oracle_plan', 'GreedyIisAgent', 'loosening_delta', 'RandomAgent',
    'DEFAULT_TIMEOUT', 'ExternalAgent', 'parse_reply',
    'BUILTIN_AGENTS', 'EXTERNAL_PREFIX', 'build_agent',
]
