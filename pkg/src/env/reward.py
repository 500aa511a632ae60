"""
Composite step reward: outcome, diagnosis, efficiency and a faithfulness
penalty for repairs aimed outside the infeasible core.
"""

from dataclasses import dataclass
from typing import Dict, Iterable

from ..saboteur import GroundTruth
from ..solver import SolveStatus
from .actions import Action
from .state import EpisodeState

OUTCOME_WEIGHT = 0.5
DIAGNOSIS_WEIGHT = 0.3
EFFICIENCY_WEIGHT = 0.2

OPTIMAL_REWARD = 100.0
INFEASIBLE_REWARD = -50.0
EFFICIENCY_SCALE = 50.0
FAITHFULNESS_PENALTY = 20.0


@dataclass(frozen=True)
class RewardBreakdown:
    """Weighted terms; the *_raw fields hold the unweighted values."""
    outcome: float
    diagnosis: float
    efficiency: float
    faithfulness_penalty: float
    total: float
    outcome_raw: float
    diagnosis_raw: float
    efficiency_raw: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "outcome": self.outcome,
            "diagnosis": self.diagnosis,
            "efficiency": self.efficiency,
            "faithfulness_penalty": self.faithfulness_penalty,
            "total": self.total,
            "outcome_raw": self.outcome_raw,
            "diagnosis_raw": self.diagnosis_raw,
            "efficiency_raw": self.efficiency_raw,
        }

    @classmethod
    def from_dict(cls, data) -> "RewardBreakdown":
        return cls(**{k: float(data[k]) for k in cls.__dataclass_fields__})


def diagnostic_accuracy(diagnosis: Iterable[str], iis_gt: Iterable[str]) -> float:
    """|diagnosis ∩ IIS| / |IIS|; 0 for an empty IIS."""
    truth = set(iis_gt)
    if not truth:
        return 0.0
    return len(set(diagnosis) & truth) / len(truth)


def is_off_target(s: EpisodeState, a: Action) -> bool:
    """
    A repair misses when its target is not in the IIS of the model it was
    applied to. Repairs on a model that is no longer infeasible have no
    IIS to miss.
    """
    if not a.kind.is_repair or s.status is not SolveStatus.INFEASIBLE:
        return False
    return a.target not in s.iis_log


def compute_reward(s: EpisodeState, a: Action, s_next: EpisodeState, gt: GroundTruth,
                   max_steps: int = 50, invalid: bool = False) -> RewardBreakdown:
    """
    Reward for taking a in s and landing in s_next.

    Diagnosis is scored against the ground-truth IIS; efficiency uses the
    step counter before the action. Invalid actions always pay the penalty.
    """
    if s_next.status is SolveStatus.OPTIMAL:
        outcome_raw = OPTIMAL_REWARD
    elif s_next.status is SolveStatus.INFEASIBLE:
        outcome_raw = INFEASIBLE_REWARD
    else:
        outcome_raw = 0.0

    diagnosis_raw = 0.0
    if a.diagnosis:
        diagnosis_raw = 100.0 * diagnostic_accuracy(a.diagnosis, gt.iis_gt.members)
    efficiency_raw = EFFICIENCY_SCALE * max(0.0, (max_steps - s.step) / max_steps)
    penalty = FAITHFULNESS_PENALTY if invalid or is_off_target(s, a) else 0.0

    outcome = OUTCOME_WEIGHT * outcome_raw
    diagnosis = DIAGNOSIS_WEIGHT * diagnosis_raw
    efficiency = EFFICIENCY_WEIGHT * efficiency_raw
    return RewardBreakdown(outcome, diagnosis, efficiency, penalty,
                           outcome + diagnosis + efficiency - penalty,
                           outcome_raw, diagnosis_raw, efficiency_raw)
