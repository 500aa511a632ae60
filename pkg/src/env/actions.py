"""
Agent actions and their translation to and from model edits.

Repair actions may target a constraint or a finite bound row
(<var>__lb / <var>__ub). On a bound row, RELAX shifts the bound by delta
and DROP removes it, so every ground-truth edit can be replayed by an
agent.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple

from ..exceptions import InvalidAction, SchemaError
from ..lp import (BoundSide, EditKind, LpModel, ModelEdit, Sense, bound_row_name,
                  parse_bound_row_name, parse_number)


class ActionKind(str, Enum):
    GET_IIS = "GET_IIS"
    CHECK_SLACK = "CHECK_SLACK"
    CHECK_BOUND = "CHECK_BOUND"
    RELAX = "RELAX"
    DROP = "DROP"
    REWRITE = "REWRITE"
    SUBMIT = "SUBMIT"
    RESTART = "RESTART"

    @property
    def is_diagnostic(self) -> bool:
        return self in DIAGNOSTIC_KINDS

    @property
    def is_repair(self) -> bool:
        return self in REPAIR_KINDS


DIAGNOSTIC_KINDS = frozenset({ActionKind.GET_IIS, ActionKind.CHECK_SLACK, ActionKind.CHECK_BOUND})
REPAIR_KINDS = frozenset({ActionKind.RELAX, ActionKind.DROP, ActionKind.REWRITE})


@dataclass(frozen=True)
class Action:
    """
    One agent action. diagnosis may be attached to any kind and names the
    constraints the agent believes cause the infeasibility.
    """
    kind: ActionKind
    target: Optional[str] = None
    delta: Optional[float] = None
    terms: Optional[Tuple[Tuple[str, float], ...]] = None
    sense: Optional[Sense] = None
    rhs: Optional[float] = None
    diagnosis: Tuple[str, ...] = ()

    @classmethod
    def get_iis(cls, diagnosis=()) -> "Action":
        return cls(ActionKind.GET_IIS, diagnosis=tuple(diagnosis))

    @classmethod
    def check_slack(cls, target: Optional[str] = None) -> "Action":
        return cls(ActionKind.CHECK_SLACK, target)

    @classmethod
    def check_bound(cls, target: Optional[str] = None) -> "Action":
        return cls(ActionKind.CHECK_BOUND, target)

    @classmethod
    def relax(cls, target: str, delta: float, diagnosis=()) -> "Action":
        return cls(ActionKind.RELAX, target, delta=float(delta), diagnosis=tuple(diagnosis))

    @classmethod
    def drop(cls, target: str, diagnosis=()) -> "Action":
        return cls(ActionKind.DROP, target, diagnosis=tuple(diagnosis))

    @classmethod
    def rewrite(cls, target: str, terms: Mapping[str, float], sense: Sense, rhs: float,
                diagnosis=()) -> "Action":
        return cls(ActionKind.REWRITE, target, terms=tuple((k, float(v)) for k, v in terms.items()),
                   sense=Sense(sense), rhs=float(rhs), diagnosis=tuple(diagnosis))

    @classmethod
    def submit(cls) -> "Action":
        return cls(ActionKind.SUBMIT)

    @classmethod
    def restart(cls) -> "Action":
        return cls(ActionKind.RESTART)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        if self.target is not None:
            data["target"] = self.target
        if self.delta is not None:
            data["delta"] = self.delta
        if self.terms is not None:
            data["terms"] = dict(self.terms)
        if self.sense is not None:
            data["sense"] = self.sense.value
        if self.rhs is not None:
            data["rhs"] = self.rhs
        if self.diagnosis:
            data["diagnosis"] = list(self.diagnosis)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Action":
        """
        Raises:
            SchemaError: unknown kind or mistyped field
        """
        if not isinstance(data, Mapping):
            raise SchemaError("Action must be an object")
        try:
            kind = ActionKind(str(data["kind"]).upper())
        except (KeyError, ValueError) as exc:
            raise SchemaError("Unknown or missing action kind", reason=str(exc))
        target = data.get("target")
        if target is not None and not isinstance(target, str):
            raise SchemaError("Action target must be a string", field="target")
        diagnosis = data.get("diagnosis") or []
        if not isinstance(diagnosis, list) or not all(isinstance(d, str) for d in diagnosis):
            raise SchemaError("diagnosis must be a list of names", field="diagnosis")
        terms = data.get("terms")
        if terms is not None and not isinstance(terms, Mapping):
            raise SchemaError("terms must be an object", field="terms")
        try:
            sense = Sense(data["sense"]) if data.get("sense") is not None else None
        except ValueError:
            raise SchemaError("Unknown sense", field="sense", value=repr(data.get("sense")))
        return cls(
            kind=kind,
            target=target,
            delta=parse_number(data["delta"], "delta") if data.get("delta") is not None else None,
            terms=tuple((k, parse_number(v, f"terms.{k}")) for k, v in terms.items())
            if terms is not None else None,
            sense=sense,
            rhs=parse_number(data["rhs"], "rhs") if data.get("rhs") is not None else None,
            diagnosis=tuple(diagnosis),
        )

    def describe(self) -> str:
        if self.kind is ActionKind.RELAX:
            return f"RELAX({self.target}, {self.delta:+g})"
        if self.target is not None:
            return f"{self.kind.value}({self.target})"
        return self.kind.value


def action_to_edit(action: Action, model: LpModel) -> ModelEdit:
    """
    Model edit for a repair action.

    Raises:
        InvalidAction: missing fields, unknown target, or a non-repair kind
    """
    kind = action.kind
    if not kind.is_repair:
        raise InvalidAction("not a repair action", kind=kind.value)
    if not action.target:
        raise InvalidAction("repair needs a target", kind=kind.value)
    target = action.target

    if model.has_constraint(target):
        if kind is ActionKind.RELAX:
            if action.delta is None or not math.isfinite(action.delta):
                raise InvalidAction("RELAX needs a finite delta", kind=kind.value, target=target)
            return ModelEdit.relax(target, action.delta)
        if kind is ActionKind.DROP:
            return ModelEdit.drop(target)
        if action.terms is None or action.sense is None or action.rhs is None:
            raise InvalidAction("REWRITE needs terms, sense and rhs", kind=kind.value,
                                target=target)
        return ModelEdit.rewrite(target, dict(action.terms), action.sense, action.rhs)

    parsed = parse_bound_row_name(target)
    if parsed is None or not model.has_row(target):
        raise InvalidAction("unknown target", kind=kind.value, target=target)
    variable, side = parsed
    var = model.variable(variable)
    current = var.lower if side is BoundSide.LOWER else var.upper
    if kind is ActionKind.RELAX:
        if action.delta is None or not math.isfinite(action.delta):
            raise InvalidAction("RELAX needs a finite delta", kind=kind.value, target=target)
        return ModelEdit.set_bound(variable, side, current + action.delta)
    if kind is ActionKind.DROP:
        return ModelEdit.set_bound(variable, side,
                                   -math.inf if side is BoundSide.LOWER else math.inf)
    raise InvalidAction("bound rows cannot be rewritten", kind=kind.value, target=target)


def edit_to_action(edit: ModelEdit, model: LpModel, diagnosis=()) -> Action:
    """
    Agent action equivalent to a model edit applied to `model`.

    FLIP becomes a REWRITE with the opposite sense, SET_RHS a RELAX by the
    difference, and SET_BOUND a RELAX (or DROP, for an infinite value) of the
    bound row.

    Raises:
        InvalidAction: the edit has no action equivalent or its target is missing
    """
    kind = edit.kind
    if kind is EditKind.RELAX:
        return Action.relax(edit.target, edit.delta, diagnosis)
    if kind is EditKind.DROP:
        return Action.drop(edit.target, diagnosis)
    if kind is EditKind.REWRITE:
        return Action.rewrite(edit.target, edit.new_terms, edit.new_sense, edit.new_rhs, diagnosis)
    if kind in (EditKind.FLIP, EditKind.SET_RHS):
        if not model.has_constraint(edit.target):
            raise InvalidAction("unknown target", kind=kind.value, target=edit.target)
        con = model.constraint(edit.target)
        if kind is EditKind.FLIP:
            return Action.rewrite(con.name, con.terms, con.sense.flipped(), con.rhs, diagnosis)
        return Action.relax(con.name, edit.value - con.rhs, diagnosis)
    if kind is EditKind.SET_BOUND:
        if not model.has_variable(edit.target):
            raise InvalidAction("unknown target", kind=kind.value, target=edit.target)
        var = model.variable(edit.target)
        row = bound_row_name(var.name, edit.side)
        current = var.lower if edit.side is BoundSide.LOWER else var.upper
        if not math.isfinite(edit.value):
            return Action.drop(row, diagnosis)
        if not math.isfinite(current):
            raise InvalidAction("cannot relax an infinite bound", kind=kind.value, target=row)
        return Action.relax(row, edit.value - current, diagnosis)
    raise InvalidAction("edit has no agent action", kind=kind.value, target=edit.target)
