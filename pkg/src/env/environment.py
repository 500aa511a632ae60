"""
The debugging environment.

An episode starts from the sabotaged model of a benchmark instance. Each
step executes one action against the real solver: diagnostic actions
reveal information, repair actions edit the model and re-solve, SUBMIT
ends the episode and RESTART goes back to the sabotaged model.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..exceptions import (EpisodeOver, InvalidAction, InvariantError, OracleDisagreement,
                          OrGymError, SolverFailure)
from ..lp import LpModel, apply_edit
from ..saboteur import BenchmarkInstance, GroundTruth
from ..solver import SolveResult, SolveStatus, SolverConfig, compute_iis, constraint_slacks, solve
from .actions import Action, ActionKind, action_to_edit
from .reward import RewardBreakdown, compute_reward
from .state import EpisodeState

logger = logging.getLogger(__name__)

FULL_SUCCESS_OP = 0.95
PARTIAL_SUCCESS_OP = 0.8


@dataclass(frozen=True)
class EnvConfig:
    """
    max_steps bounds repair and meta actions; all actions together are
    capped at total_action_factor * max_steps.
    """
    max_steps: int = 50
    per_solve_timeout: float = 10.0
    diagnostic_actions_free: bool = True
    total_action_factor: int = 4

    def __post_init__(self):
        if self.max_steps < 1:
            raise InvariantError("max_steps must be >= 1", max_steps=self.max_steps)
        if self.per_solve_timeout <= 0:
            raise InvariantError("per_solve_timeout must be positive")

    @property
    def max_total_actions(self) -> int:
        return self.total_action_factor * self.max_steps

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(timeout=self.per_solve_timeout)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_steps": self.max_steps,
            "per_solve_timeout": self.per_solve_timeout,
            "diagnostic_actions_free": self.diagnostic_actions_free,
            "total_action_factor": self.total_action_factor,
        }


class OutcomeClass(str, Enum):
    FULL_SUCCESS = "FullSuccess"
    PARTIAL_SUCCESS = "PartialSuccess"
    FAILURE = "Failure"


def optimality_preservation(objective: Optional[float], original: float) -> float:
    """
    1 - |objective - original| / |original|.

    With an original objective of zero the relative change is undefined;
    OP is then 1 when the repaired objective is also zero and 0 otherwise.
    """
    if objective is None:
        return 0.0
    if abs(original) < 1e-9:
        return 1.0 if abs(objective) <= 1e-6 else 0.0
    return 1.0 - abs(objective - original) / abs(original)


def classify_outcome(episode: EpisodeState, gt: GroundTruth) -> Tuple[OutcomeClass, float]:
    """Outcome class and OP score of a finished episode."""
    if episode.status is not SolveStatus.OPTIMAL:
        return OutcomeClass.FAILURE, 0.0
    op = optimality_preservation(episode.objective, gt.original_objective)
    if op > FULL_SUCCESS_OP:
        return OutcomeClass.FULL_SUCCESS, op
    if op > PARTIAL_SUCCESS_OP:
        return OutcomeClass.PARTIAL_SUCCESS, op
    return OutcomeClass.FAILURE, op


@dataclass(frozen=True)
class Transition:
    """One episode-log entry."""
    state_digest: str
    action: Action
    reward: RewardBreakdown
    status: SolveStatus
    iis_size_before: int
    iis_size_after: int
    step: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "state_digest": self.state_digest,
            "action": self.action.to_dict(),
            "reward": self.reward.to_dict(),
            "status": self.status.value,
            "iis_size_before": self.iis_size_before,
            "iis_size_after": self.iis_size_after,
            "step": self.step,
        }

    @classmethod
    def from_dict(cls, data) -> "Transition":
        return cls(data["state_digest"], Action.from_dict(data["action"]),
                   RewardBreakdown.from_dict(data["reward"]), SolveStatus(data["status"]),
                   int(data["iis_size_before"]), int(data["iis_size_after"]), int(data["step"]))


def bound_report(model: LpModel, primal, tol: float = 1e-7) -> Dict[str, Dict[str, Any]]:
    """Per variable: bounds, current value and where the value sits."""
    report = {}
    for var in model.variables:
        value = primal.get(var.name, 0.0)
        if math.isfinite(var.lower) and abs(value - var.lower) <= tol:
            where = "at_lower"
        elif math.isfinite(var.upper) and abs(value - var.upper) <= tol:
            where = "at_upper"
        else:
            where = "between"
        report[var.name] = {"lower": var.lower, "upper": var.upper, "value": value, "status": where}
    return report


class DebugEnv:
    """
    Environment bound to one benchmark instance.

    States are immutable; step() returns a new state and never touches the
    one it was given.
    """

    def __init__(self, instance: BenchmarkInstance, config: EnvConfig = EnvConfig()):
        self.instance = instance
        self.config = config
        self.solver_config = config.solver_config
        self._initial: Optional[EpisodeState] = None

    @property
    def ground_truth(self) -> GroundTruth:
        return self.instance.ground_truth

    def _observe(self, model: LpModel) -> Tuple[SolveResult, Tuple[str, ...]]:
        """Solve and, when INFEASIBLE, attach the IIS; a failed IIS run reads as ERROR."""
        result = solve(model, self.solver_config)
        iis: Tuple[str, ...] = ()
        if result.status is SolveStatus.INFEASIBLE:
            try:
                iis = compute_iis(model, self.solver_config, status=result.status).members
            except SolverFailure as exc:
                logger.warning("IIS computation failed on %s: %s", self.instance.id, exc)
                result = replace(result, status=SolveStatus.ERROR, message=exc.base_message)
        return result, iis

    def reset(self) -> EpisodeState:
        """
        Raises:
            OracleDisagreement: the sabotaged model is not INFEASIBLE
        """
        if self._initial is None:
            model = self.instance.sabotaged
            result, iis = self._observe(model)
            if result.status is not SolveStatus.INFEASIBLE:
                raise OracleDisagreement(self.instance.id, SolveStatus.INFEASIBLE.value,
                                         result.status.value)
            self._initial = EpisodeState(
                problem_nl=self.instance.problem_nl,
                code=model,
                status=result.status,
                iis_log=iis,
                primal=dict(result.primal),
            )
        return self._initial

    def _diagnose(self, s: EpisodeState, a: Action) -> EpisodeState:
        if a.kind is ActionKind.GET_IIS:
            return replace(s, iis_visible=True)
        if a.kind is ActionKind.CHECK_SLACK:
            slacks = constraint_slacks(s.code, s.primal) if s.primal else {}
            if a.target is not None:
                if a.target not in slacks:
                    raise InvalidAction("unknown constraint", kind=a.kind.value, target=a.target)
                slacks = {a.target: slacks[a.target]}
            return replace(s, slack_values=slacks)
        report = bound_report(s.code, s.primal)
        if a.target is not None:
            if a.target not in report:
                raise InvalidAction("unknown variable", kind=a.kind.value, target=a.target)
            report = {a.target: report[a.target]}
        return replace(s, bound_status=report)

    def _resolve(self, s: EpisodeState, model: LpModel) -> EpisodeState:
        result, iis = self._observe(model)
        return replace(s, code=model, status=result.status, iis_log=iis,
                       objective=result.objective, primal=dict(result.primal),
                       slack_values=None, bound_status=None)

    def step(self, s: EpisodeState, a: Action) -> Tuple[EpisodeState, RewardBreakdown, bool]:
        """
        Execute one action.

        Invalid actions (unknown target, malformed repair) leave the model
        and step counter unchanged, are recorded in the history and pay the
        faithfulness penalty.

        Raises:
            EpisodeOver: s is already finished
        """
        if s.done:
            raise EpisodeOver(s.step)
        base = replace(s, history=s.history + (a,), total_actions=s.total_actions + 1,
                       diagnosed=s.diagnosed | frozenset(a.diagnosis), last_error=None)
        invalid = False
        try:
            nxt = self._execute(base, a)
        except (InvalidAction, InvariantError) as exc:
            logger.debug("invalid action %s: %s", a.describe(), exc)
            invalid = True
            nxt = replace(base, last_error=str(exc))

        done = (nxt.done or nxt.step >= self.config.max_steps
                or nxt.total_actions >= self.config.max_total_actions)
        nxt = replace(nxt, done=done)
        reward = compute_reward(s, a, nxt, self.ground_truth, self.config.max_steps, invalid)
        return nxt, reward, done

    def _execute(self, s: EpisodeState, a: Action) -> EpisodeState:
        if a.kind.is_diagnostic:
            nxt = self._diagnose(s, a)
            if not self.config.diagnostic_actions_free:
                nxt = replace(nxt, step=nxt.step + 1)
            return nxt
        if a.kind is ActionKind.SUBMIT:
            result, iis = self._observe(s.code)
            return replace(s, status=result.status, iis_log=iis, objective=result.objective,
                           primal=dict(result.primal), step=s.step + 1, done=True)
        if a.kind is ActionKind.RESTART:
            initial = self.reset()
            return replace(s, code=initial.code, status=initial.status, iis_log=initial.iis_log,
                           objective=None, primal=initial.primal, slack_values=None,
                           bound_status=None, step=s.step + 1)
        edit = action_to_edit(a, s.code)
        try:
            model = apply_edit(s.code, edit)
        except OrGymError as exc:
            raise InvalidAction(exc.base_message, kind=a.kind.value, target=a.target)
        return replace(self._resolve(s, model), step=s.step + 1)


def run_actions(env: DebugEnv, actions) -> Tuple[EpisodeState, List[Transition]]:
    """Replay a fixed action list from reset; stops early when the episode ends."""
    state = env.reset()
    log: List[Transition] = []
    for action in actions:
        if state.done:
            break
        nxt, reward, _ = env.step(state, action)
        log.append(Transition(state.digest(), action, reward, nxt.status,
                              len(state.iis_log), len(nxt.iis_log), nxt.step))
        state = nxt
    return state, log
