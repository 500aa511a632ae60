"""
Edit primitives shared by sabotage (injecting errors) and repair (agent actions).
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Mapping, Optional

from ..exceptions import FlipOnEquality, InvariantError, SchemaError, UnknownTarget
from .model import BoundSide, Constraint, LpModel, Sense
from .serialization import parse_number


class EditKind(str, Enum):
    RELAX = "RELAX"
    DROP = "DROP"
    REWRITE = "REWRITE"
    FLIP = "FLIP"
    SET_RHS = "SET_RHS"
    SET_BOUND = "SET_BOUND"
    ADD = "ADD"


@dataclass(frozen=True)
class ModelEdit:
    """
    One model modification.

    target is a constraint name, or a variable name for SET_BOUND.
    ADD inserts a new constraint (used by the saboteur only) at position
    `position` (None appends).
    """
    kind: EditKind
    target: str
    delta: Optional[float] = None
    value: Optional[float] = None
    side: Optional[BoundSide] = None
    new_terms: Optional[Mapping[str, float]] = None
    new_sense: Optional[Sense] = None
    new_rhs: Optional[float] = None
    position: Optional[int] = None

    def __hash__(self):
        terms = tuple(self.new_terms.items()) if self.new_terms is not None else None
        return hash((self.kind, self.target, self.delta, self.value, self.side,
                     terms, self.new_sense, self.new_rhs, self.position))

    # --- constructors ----------------------------------------------------------

    @classmethod
    def relax(cls, target: str, delta: float) -> "ModelEdit":
        return cls(EditKind.RELAX, target, delta=float(delta))

    @classmethod
    def drop(cls, target: str) -> "ModelEdit":
        return cls(EditKind.DROP, target)

    @classmethod
    def rewrite(cls, target: str, terms: Mapping[str, float], sense: Sense, rhs: float) -> "ModelEdit":
        return cls(EditKind.REWRITE, target, new_terms=dict(terms), new_sense=Sense(sense),
                   new_rhs=float(rhs))

    @classmethod
    def flip(cls, target: str) -> "ModelEdit":
        return cls(EditKind.FLIP, target)

    @classmethod
    def set_rhs(cls, target: str, value: float) -> "ModelEdit":
        return cls(EditKind.SET_RHS, target, value=float(value))

    @classmethod
    def set_bound(cls, variable: str, side: BoundSide, value: float) -> "ModelEdit":
        return cls(EditKind.SET_BOUND, variable, side=BoundSide(side), value=float(value))

    @classmethod
    def add(cls, constraint: Constraint, position: Optional[int] = None) -> "ModelEdit":
        return cls(EditKind.ADD, constraint.name, new_terms=dict(constraint.terms),
                   new_sense=constraint.sense, new_rhs=constraint.rhs, position=position)

    # --- plain data --------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "target": self.target}
        if self.delta is not None:
            data["delta"] = self.delta
        if self.value is not None:
            data["value"] = self.value
        if self.side is not None:
            data["side"] = self.side.value
        if self.new_terms is not None:
            data["terms"] = dict(self.new_terms)
        if self.new_sense is not None:
            data["sense"] = self.new_sense.value
        if self.new_rhs is not None:
            data["rhs"] = self.new_rhs
        if self.position is not None:
            data["position"] = self.position
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModelEdit":
        try:
            kind = EditKind(data["kind"])
            target = data["target"]
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError("Malformed edit", reason=str(exc))
        if not isinstance(target, str):
            raise SchemaError("Edit target must be a string", field="target")

        def num(key: str) -> Optional[float]:
            return parse_number(data[key], key) if data.get(key) is not None else None

        terms = data.get("terms")
        try:
            return cls(
                kind=kind,
                target=target,
                delta=num("delta"),
                value=num("value"),
                side=BoundSide(data["side"]) if data.get("side") is not None else None,
                new_terms={k: parse_number(v, f"terms.{k}") for k, v in terms.items()}
                if terms is not None else None,
                new_sense=Sense(data["sense"]) if data.get("sense") is not None else None,
                new_rhs=num("rhs"),
                position=int(data["position"]) if data.get("position") is not None else None,
            )
        except (ValueError, AttributeError) as exc:
            raise SchemaError("Malformed edit", reason=str(exc))

    def describe(self) -> str:
        if self.kind is EditKind.RELAX:
            return f"RELAX({self.target}, {self.delta:+g})"
        if self.kind is EditKind.SET_RHS:
            return f"SET_RHS({self.target}, {self.value:g})"
        if self.kind is EditKind.SET_BOUND:
            return f"SET_BOUND({self.target}.{self.side.value}, {self.value:g})"
        return f"{self.kind.value}({self.target})"


def _replace_constraint(m: LpModel, name: str, new: Optional[Constraint]) -> LpModel:
    rows = []
    for con in m.constraints:
        if con.name == name:
            if new is not None:
                rows.append(new)
        else:
            rows.append(con)
    return m.with_constraints(rows)


def apply_edit(m: LpModel, e: ModelEdit) -> LpModel:
    """
    Return a new model with the edit applied; m is left untouched.

    Raises:
        UnknownTarget: the target constraint/variable does not exist
        FlipOnEquality: FLIP on an EQ constraint
        InvariantError: the edit would break a model invariant
    """
    if e.kind is EditKind.SET_BOUND:
        if not m.has_variable(e.target):
            raise UnknownTarget(e.target, kind=e.kind.value)
        var = m.variable(e.target)
        value = float(e.value)
        if e.side is BoundSide.LOWER:
            updated = replace(var, lower=value)
        else:
            updated = replace(var, upper=value)
        return m.with_variables(updated if v.name == var.name else v for v in m.variables)

    if e.kind is EditKind.ADD:
        if m.has_constraint(e.target):
            raise InvariantError("Constraint already exists", constraint=e.target)
        con = Constraint(e.target, e.new_terms, e.new_sense, e.new_rhs)
        rows = list(m.constraints)
        position = len(rows) if e.position is None else max(0, min(e.position, len(rows)))
        rows.insert(position, con)
        return m.with_constraints(rows)

    if not m.has_constraint(e.target):
        raise UnknownTarget(e.target, kind=e.kind.value)
    con = m.constraint(e.target)

    if e.kind is EditKind.DROP:
        return _replace_constraint(m, con.name, None)
    if e.kind is EditKind.RELAX:
        if e.delta is None or not math.isfinite(e.delta):
            raise InvariantError("RELAX needs a finite delta", constraint=con.name)
        return _replace_constraint(m, con.name, replace(con, rhs=con.rhs + e.delta))
    if e.kind is EditKind.SET_RHS:
        return _replace_constraint(m, con.name, replace(con, rhs=e.value))
    if e.kind is EditKind.FLIP:
        if con.sense is Sense.EQ:
            raise FlipOnEquality(con.name)
        return _replace_constraint(m, con.name, replace(con, sense=con.sense.flipped()))
    if e.kind is EditKind.REWRITE:
        if e.new_terms is None or e.new_sense is None or e.new_rhs is None:
            raise InvariantError("REWRITE needs terms, sense and rhs", constraint=con.name)
        new = Constraint(con.name, e.new_terms, e.new_sense, e.new_rhs)
        for var in new.terms:
            if not m.has_variable(var):
                raise UnknownTarget(var, kind="variable")
        return _replace_constraint(m, con.name, new)
    raise InvariantError("Unsupported edit kind", kind=e.kind.value)


def apply_edits(m: LpModel, edits) -> LpModel:
    for e in edits:
        m = apply_edit(m, e)
    return m
