"""
Canonical JSON encoding for models and every other artifact we write.

Numbers are written with 17 significant digits so floats round-trip
exactly; infinities become the strings "-inf"/"+inf". Object keys keep
the order in which they were built, so equal values always produce the
same bytes.
"""

import json
import math
from typing import Any, Dict, List, Mapping

from ..exceptions import InvariantError, SchemaError
from .model import Constraint, LpModel, ObjectiveSense, Sense, Variable

SCHEMA_VERSION = 1

_INF_STRINGS = {"+inf": math.inf, "inf": math.inf, "-inf": -math.inf}


def format_number(value: float) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        raise ValueError("NaN cannot be serialized")
    if math.isinf(value):
        return json.dumps("+inf" if value > 0 else "-inf")
    text = format(value, ".17g")
    if text == "-0":
        text = "0"
    return text


def dumps_canonical(obj: Any) -> str:
    """Serialize plain data (dict/list/str/number/bool/None) deterministically."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        items = ",".join(f"{json.dumps(str(k), ensure_ascii=False)}:{dumps_canonical(v)}"
                         for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps_canonical(obj.item())
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


def parse_number(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise SchemaError("Expected a number", field=where)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and value in _INF_STRINGS:
        return _INF_STRINGS[value]
    raise SchemaError("Expected a number or '-inf'/'+inf'", field=where, value=repr(value))


# --- model <-> plain data -----------------------------------------------------

def model_to_dict(m: LpModel) -> Dict[str, Any]:
    return {
        "objective_sense": m.objective_sense.value,
        "variables": [
            {"name": v.name, "lower": v.lower, "upper": v.upper, "obj_coeff": v.obj_coeff}
            for v in m.variables
        ],
        "constraints": [
            {"name": c.name, "terms": dict(c.terms), "sense": c.sense.value, "rhs": c.rhs}
            for c in m.constraints
        ],
        "description": m.description,
    }


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(obj, Mapping):
        raise SchemaError("Expected an object", field=where)
    if key not in obj:
        raise SchemaError("Missing field", field=f"{where}.{key}")
    return obj[key]


def model_from_dict(data: Mapping[str, Any]) -> LpModel:
    """Build an LpModel from parsed JSON, raising SchemaError/InvariantError."""
    sense_raw = _require(data, "objective_sense", "model")
    try:
        sense = ObjectiveSense(sense_raw)
    except ValueError:
        raise SchemaError("Unknown objective sense", field="model.objective_sense",
                          value=repr(sense_raw))

    raw_vars = _require(data, "variables", "model")
    raw_cons = _require(data, "constraints", "model")
    if not isinstance(raw_vars, list) or not isinstance(raw_cons, list):
        raise SchemaError("variables and constraints must be arrays", field="model")

    variables: List[Variable] = []
    for i, rv in enumerate(raw_vars):
        where = f"variables[{i}]"
        name = _require(rv, "name", where)
        if not isinstance(name, str):
            raise SchemaError("Name must be a string", field=f"{where}.name")
        variables.append(Variable(
            name=name,
            lower=parse_number(_require(rv, "lower", where), f"{where}.lower"),
            upper=parse_number(_require(rv, "upper", where), f"{where}.upper"),
            obj_coeff=parse_number(_require(rv, "obj_coeff", where), f"{where}.obj_coeff"),
        ))

    constraints: List[Constraint] = []
    for i, rc in enumerate(raw_cons):
        where = f"constraints[{i}]"
        name = _require(rc, "name", where)
        terms = _require(rc, "terms", where)
        if not isinstance(name, str) or not isinstance(terms, Mapping):
            raise SchemaError("Malformed constraint", field=where)
        sense_raw = _require(rc, "sense", where)
        try:
            con_sense = Sense(sense_raw)
        except ValueError:
            raise SchemaError("Unknown constraint sense", field=f"{where}.sense",
                              value=repr(sense_raw))
        constraints.append(Constraint(
            name=name,
            terms={k: parse_number(v, f"{where}.terms.{k}") for k, v in terms.items()},
            sense=con_sense,
            rhs=parse_number(_require(rc, "rhs", where), f"{where}.rhs"),
        ))

    description = data.get("description")
    if description is not None and not isinstance(description, str):
        raise SchemaError("description must be a string or null", field="model.description")
    return LpModel(sense, tuple(variables), tuple(constraints), description)


def serialize_model(m: LpModel) -> str:
    """Canonical JSON text for a model."""
    return dumps_canonical(model_to_dict(m))


def parse_model(text: str) -> LpModel:
    """
    Parse canonical JSON into an LpModel.

    Raises:
        SchemaError: malformed JSON or a missing/mistyped field
        InvariantError: data parses but violates a model invariant
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("Invalid JSON", reason=str(exc))
    try:
        return model_from_dict(data)
    except (SchemaError, InvariantError):
        raise
    except (TypeError, AttributeError) as exc:
        raise SchemaError("Malformed model", reason=str(exc))
