"""
Episode state and its agent-facing serialization.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Mapping, Optional, Tuple

from ..lp import SCHEMA_VERSION, LpModel, dumps_canonical, model_to_dict
from ..solver import SolveStatus
from .actions import Action


@dataclass(frozen=True)
class EpisodeState:
    """
    The eight agent-visible components plus bookkeeping.

    iis_log always holds the IIS of the current model (empty unless the
    model is INFEASIBLE); the agent only sees it once iis_visible is set
    by GET_IIS. primal is the last solve's point (phase-1 point when
    infeasible) and backs CHECK_SLACK / CHECK_BOUND.
    """
    problem_nl: str
    code: LpModel
    status: SolveStatus
    iis_log: Tuple[str, ...] = ()
    slack_values: Optional[Mapping[str, float]] = None
    bound_status: Optional[Mapping[str, Mapping[str, Any]]] = None
    history: Tuple[Action, ...] = ()
    step: int = 0
    iis_visible: bool = False
    objective: Optional[float] = None
    primal: Mapping[str, float] = field(default_factory=dict)
    total_actions: int = 0
    diagnosed: FrozenSet[str] = frozenset()
    done: bool = False
    last_error: Optional[str] = None

    def __hash__(self):
        return hash(self.digest())

    def to_agent_dict(self) -> Dict[str, Any]:
        """The eight state components as the agent sees them."""
        return {
            "problem_nl": self.problem_nl,
            "code": model_to_dict(self.code),
            "status": self.status.value,
            "iis_log": list(self.iis_log) if self.iis_visible else [],
            "slack_values": dict(self.slack_values) if self.slack_values is not None else None,
            "bound_status": ({k: dict(v) for k, v in self.bound_status.items()}
                             if self.bound_status is not None else None),
            "history": [a.to_dict() for a in self.history],
            "step": self.step,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.to_agent_dict()
        data["schema_version"] = SCHEMA_VERSION
        data["iis_log"] = list(self.iis_log)
        data["iis_visible"] = self.iis_visible
        data["objective"] = self.objective
        data["total_actions"] = self.total_actions
        data["diagnosed"] = sorted(self.diagnosed)
        data["done"] = self.done
        data["last_error"] = self.last_error
        return data

    def digest(self) -> str:
        """Short content hash used to identify states in logs and replays."""
        return hashlib.sha256(dumps_canonical(self.to_dict()).encode("utf-8")).hexdigest()[:16]
