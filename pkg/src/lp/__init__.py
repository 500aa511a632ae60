"""LP data model, canonical serialization and edit primitives."""

from .model import (Variable, Constraint, LpModel, Sense, ObjectiveSense, BoundSide,
                    bound_row_name, parse_bound_row_name, format_model)
from .serialization import (SCHEMA_VERSION, dumps_canonical, model_to_dict, model_from_dict,
                            serialize_model, parse_model, parse_number)
from .edits import EditKind, ModelEdit, apply_edit, apply_edits

__all__ = [
    'Variable', 'Constraint', 'LpModel', 'Sense', 'ObjectiveSense', 'BoundSide',
    'bound_row_name', 'parse_bound_row_name', 'format_model',
    'SCHEMA_VERSION', 'dumps_canonical', 'model_to_dict', 'model_from_dict',
    'serialize_model', 'parse_model', 'parse_number',
    'EditKind', 'ModelEdit', 'apply_edit', 'apply_edits',
]
