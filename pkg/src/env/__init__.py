"""
Debugging environment: actions, episode state, reward, the solver-backed
environment and the offline simulator.
"""

from .actions import Action, ActionKind, DIAGNOSTIC_KINDS, REPAIR_KINDS, action_to_edit, edit_to_action
from .state import EpisodeState
from .reward import RewardBreakdown, compute_reward, diagnostic_accuracy, is_off_target
from .environment import (EnvConfig, OutcomeClass, Transition, DebugEnv, classify_outcome,
                          optimality_preservation, bound_report, run_actions)
from .simulator import simulate_step

__all__ = [
    'Action', 'ActionKind', 'DIAGNOSTIC_KINDS', 'REPAIR_KINDS', 'action_to_edit', 'edit_to_action',
    'EpisodeState',
    'RewardBreakdown', 'compute_reward', 'diagnostic_accuracy', 'is_off_target',
    'EnvConfig', 'OutcomeClass', 'Transition', 'DebugEnv', 'classify_outcome',
    'optimality_preservation', 'bound_report', 'run_actions',
    'simulate_step',
]
