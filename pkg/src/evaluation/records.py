"""
Episode records and their JSONL encoding.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from ..env import OutcomeClass, Transition
from ..exceptions import SchemaError
from ..lp import SCHEMA_VERSION, dumps_canonical
from ..solver import SolveStatus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeRecord:
    """
    Outcome of one attempt on one instance.

    first_success_step is the step counter when the episode ended, set only
    for successful episodes (None stands for "never"). repair_steps counts
    the repair actions that edited the model; total_steps is the final step
    counter, which also includes SUBMIT and RESTART.
    """
    instance_id: str
    attempt_index: int
    error_type: str
    difficulty: str
    success: bool
    first_success_step: Optional[int]
    da: float
    op: float
    repair_steps: int
    total_steps: int
    outcome: OutcomeClass
    final_status: SolveStatus
    protocol_error: bool = False
    error: Optional[str] = None
    trajectory: Tuple[Transition, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.success and self.first_success_step is None:
            raise SchemaError("Successful record needs first_success_step",
                              instance_id=self.instance_id, attempt_index=self.attempt_index)

    @property
    def full_success(self) -> bool:
        return self.outcome is OutcomeClass.FULL_SUCCESS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "instance_id": self.instance_id,
            "attempt_index": self.attempt_index,
            "error_type": self.error_type,
            "difficulty": self.difficulty,
            "success": self.success,
            "first_success_step": self.first_success_step,
            "da": self.da,
            "op": self.op,
            "repair_steps": self.repair_steps,
            "total_steps": self.total_steps,
            "outcome": self.outcome.value,
            "final_status": self.final_status.value,
            "protocol_error": self.protocol_error,
            "error": self.error,
            "trajectory": [t.to_dict() for t in self.trajectory],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EpisodeRecord":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaError("Unsupported schema_version", field="schema_version",
                              value=repr(version))
        try:
            step = data.get("first_success_step")
            return cls(
                instance_id=data["instance_id"],
                attempt_index=int(data["attempt_index"]),
                error_type=data["error_type"],
                difficulty=data["difficulty"],
                success=bool(data["success"]),
                first_success_step=int(step) if step is not None else None,
                da=float(data["da"]),
                op=float(data["op"]),
                repair_steps=int(data["repair_steps"]),
                total_steps=int(data["total_steps"]),
                outcome=OutcomeClass(data["outcome"]),
                final_status=SolveStatus(data["final_status"]),
                protocol_error=bool(data.get("protocol_error", False)),
                error=data.get("error"),
                trajectory=tuple(Transition.from_dict(t) for t in data.get("trajectory", [])),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError("Malformed episode record", reason=str(exc))


def write_records(path: str, records: Iterable[EpisodeRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(dumps_canonical(record.to_dict()) + "\n")
            count += 1
    logger.info("wrote %d records to %s", count, path)
    return count


def read_records(path: str) -> List[EpisodeRecord]:
    """
    Raises:
        SchemaError: a line is not valid JSON or not a valid record
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError("Invalid JSON", path=path, line=lineno, reason=exc.msg)
            records.append(EpisodeRecord.from_dict(data))
    return records
