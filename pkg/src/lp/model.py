"""
Linear program data model.

Variables, constraints and models are immutable values. Edits produce new
models; nothing here mutates in place.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Tuple

from ..exceptions import InvariantError

BOUND_LOWER_SUFFIX = "__lb"
BOUND_UPPER_SUFFIX = "__ub"


class Sense(str, Enum):
    LE = "LE"
    GE = "GE"
    EQ = "EQ"

    @property
    def symbol(self) -> str:
        return {"LE": "<=", "GE": ">=", "EQ": "=="}[self.value]

    def flipped(self) -> "Sense":
        if self is Sense.LE:
            return Sense.GE
        if self is Sense.GE:
            return Sense.LE
        raise ValueError("equality has no flipped sense")


class ObjectiveSense(str, Enum):
    MIN = "MIN"
    MAX = "MAX"


class BoundSide(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


def bound_row_name(variable: str, side: BoundSide) -> str:
    """Name of the implicit constraint row for a variable bound."""
    suffix = BOUND_LOWER_SUFFIX if side is BoundSide.LOWER else BOUND_UPPER_SUFFIX
    return f"{variable}{suffix}"


def parse_bound_row_name(name: str) -> Optional[Tuple[str, BoundSide]]:
    """Inverse of bound_row_name; None when name is not a bound row."""
    if name.endswith(BOUND_LOWER_SUFFIX):
        return name[: -len(BOUND_LOWER_SUFFIX)], BoundSide.LOWER
    if name.endswith(BOUND_UPPER_SUFFIX):
        return name[: -len(BOUND_UPPER_SUFFIX)], BoundSide.UPPER
    return None


@dataclass(frozen=True)
class Variable:
    """Decision variable with (possibly infinite) bounds and objective coefficient."""
    name: str
    lower: float = 0.0
    upper: float = math.inf
    obj_coeff: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        object.__setattr__(self, "obj_coeff", float(self.obj_coeff))
        if not self.name:
            raise InvariantError("Variable name must be non-empty")
        if math.isnan(self.lower) or math.isnan(self.upper) or math.isnan(self.obj_coeff):
            raise InvariantError("Variable fields must not be NaN", variable=self.name)
        if self.lower > self.upper:
            raise InvariantError("Variable lower bound exceeds upper bound",
                                 variable=self.name, lower=self.lower, upper=self.upper)
        if math.isinf(self.obj_coeff):
            raise InvariantError("Objective coefficient must be finite", variable=self.name)


@dataclass(frozen=True)
class Constraint:
    """
    Linear constraint sum(terms[v] * v) <sense> rhs.

    terms keeps insertion order; the mapping is copied on construction so
    callers cannot mutate the constraint through their own dict.
    """
    name: str
    terms: Mapping[str, float]
    sense: Sense
    rhs: float

    def __post_init__(self):
        object.__setattr__(self, "terms", {str(k): float(v) for k, v in dict(self.terms).items()})
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "rhs", float(self.rhs))
        if not self.name:
            raise InvariantError("Constraint name must be non-empty")
        if not any(v != 0.0 for v in self.terms.values()):
            raise InvariantError("Constraint needs at least one nonzero coefficient",
                                 constraint=self.name)
        if not math.isfinite(self.rhs) or not all(math.isfinite(v) for v in self.terms.values()):
            raise InvariantError("Constraint data must be finite", constraint=self.name)

    def activity(self, values: Mapping[str, float]) -> float:
        return math.fsum(coef * values[var] for var, coef in self.terms.items())

    def expression(self) -> str:
        """Readable algebraic form, e.g. 'x0 + 2*x1 >= 10'."""
        pieces = []
        for i, (var, coef) in enumerate(self.terms.items()):
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            body = var if mag == 1.0 else f"{mag:g}*{var}"
            if i == 0:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f"{sign} {body}")
        return f"{' '.join(pieces)} {self.sense.symbol} {self.rhs:g}"

    def __hash__(self):
        return hash((self.name, tuple(self.terms.items()), self.sense, self.rhs))


@dataclass(frozen=True)
class LpModel:
    """
    A linear program: objective sense, ordered variables, ordered constraints.

    The objective is sum(v.obj_coeff * v) over variables.
    """
    objective_sense: ObjectiveSense
    variables: Tuple[Variable, ...]
    constraints: Tuple[Constraint, ...] = ()
    description: Optional[str] = None
    _var_index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False, hash=False)
    _con_index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "objective_sense", ObjectiveSense(self.objective_sense))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))

        var_index: Dict[str, int] = {}
        for i, var in enumerate(self.variables):
            if var.name in var_index:
                raise InvariantError("Duplicate variable name", variable=var.name)
            var_index[var.name] = i
        con_index: Dict[str, int] = {}
        for i, con in enumerate(self.constraints):
            if con.name in con_index:
                raise InvariantError("Duplicate constraint name", constraint=con.name)
            for var in con.terms:
                if var not in var_index:
                    raise InvariantError("Constraint references unknown variable",
                                         constraint=con.name, variable=var)
            con_index[con.name] = i
        object.__setattr__(self, "_var_index", var_index)
        object.__setattr__(self, "_con_index", con_index)

    # --- lookup ------------------------------------------------------------

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def constraint_names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.constraints)

    def has_variable(self, name: str) -> bool:
        return name in self._var_index

    def has_constraint(self, name: str) -> bool:
        return name in self._con_index

    def variable(self, name: str) -> Variable:
        return self.variables[self._var_index[name]]

    def constraint(self, name: str) -> Constraint:
        return self.constraints[self._con_index[name]]

    def has_row(self, name: str) -> bool:
        """True for constraints and for finite variable-bound rows."""
        if self.has_constraint(name):
            return True
        parsed = parse_bound_row_name(name)
        if parsed is None or not self.has_variable(parsed[0]):
            return False
        var = self.variable(parsed[0])
        bound = var.lower if parsed[1] is BoundSide.LOWER else var.upper
        return math.isfinite(bound)

    def objective_value(self, values: Mapping[str, float]) -> float:
        return math.fsum(v.obj_coeff * values[v.name] for v in self.variables)

    # --- derived models ----------------------------------------------------

    def with_constraints(self, constraints: Iterable[Constraint]) -> "LpModel":
        return replace(self, constraints=tuple(constraints))

    def with_variables(self, variables: Iterable[Variable]) -> "LpModel":
        return replace(self, variables=tuple(variables))

    def with_objective(self, coefficients: Mapping[str, float],
                       sense: ObjectiveSense = ObjectiveSense.MIN) -> "LpModel":
        """Same feasible region, different linear objective."""
        variables = [replace(v, obj_coeff=float(coefficients.get(v.name, 0.0)))
                     for v in self.variables]
        return replace(self, objective_sense=sense, variables=tuple(variables))

    def expand_bounds(self) -> "LpModel":
        """
        Move every finite variable bound into an explicit constraint row.

        Rows are ordered: model constraints first, then for each variable
        in order its lower row and its upper row. All variables of the
        returned model are free.
        """
        rows = list(self.constraints)
        for var in self.variables:
            if math.isfinite(var.lower):
                rows.append(Constraint(bound_row_name(var.name, BoundSide.LOWER),
                                       {var.name: 1.0}, Sense.GE, var.lower))
            if math.isfinite(var.upper):
                rows.append(Constraint(bound_row_name(var.name, BoundSide.UPPER),
                                       {var.name: 1.0}, Sense.LE, var.upper))
        free = [replace(v, lower=-math.inf, upper=math.inf) for v in self.variables]
        return LpModel(self.objective_sense, tuple(free), tuple(rows), self.description)

    def rename_constraints(self, mapping: Mapping[str, str]) -> "LpModel":
        renamed = [replace(c, name=mapping.get(c.name, c.name)) for c in self.constraints]
        return replace(self, constraints=tuple(renamed))

    def __hash__(self):
        return hash((self.objective_sense, self.variables, self.constraints, self.description))


def format_model(model: LpModel) -> str:
    """Render a model as readable algebra, one row per line."""
    objective_terms = [f"{v.obj_coeff:g}*{v.name}" for v in model.variables if v.obj_coeff != 0.0]
    head = "minimize" if model.objective_sense is ObjectiveSense.MIN else "maximize"
    lines = [f"{head} " + (" + ".join(objective_terms) if objective_terms else "0")]
    lines.append("subject to")
    for con in model.constraints:
        lines.append(f"  {con.name}: {con.expression()}")
    lines.append("bounds")
    for var in model.variables:
        lines.append(f"  {var.lower:g} <= {var.name} <= {var.upper:g}")
    return "\n".join(lines)
