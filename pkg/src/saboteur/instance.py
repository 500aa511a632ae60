"""
Benchmark instance records and their JSONL encoding.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from ..exceptions import InvariantError, SchemaError
from ..lp import (SCHEMA_VERSION, LpModel, ModelEdit, dumps_canonical, model_from_dict,
                  model_to_dict, parse_number)
from ..solver import IisReport
from .error_types import Difficulty, ErrorType

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SabotageConfig:
    """
    Saboteur parameters.

    alpha=None draws the over-allocation factor uniformly from [1.2, 1.5]
    for every Type E injection. With calibrate on, an injection is only
    accepted when its IIS size lies in the error type's target range.
    """
    alpha: Optional[float] = None
    num_candidates: int = 10
    max_regenerations: int = 3
    rng_seed: int = 0
    calibrate: bool = True

    def __post_init__(self):
        if self.alpha is not None and self.alpha <= 1.0:
            raise InvariantError("alpha must exceed 1", alpha=self.alpha)
        if self.num_candidates < 1:
            raise InvariantError("num_candidates must be >= 1", num_candidates=self.num_candidates)
        if self.max_regenerations < 0:
            raise InvariantError("max_regenerations must be >= 0",
                                 max_regenerations=self.max_regenerations)
        if self.rng_seed < 0:
            raise InvariantError("rng_seed must be unsigned", rng_seed=self.rng_seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "num_candidates": self.num_candidates,
            "max_regenerations": self.max_regenerations,
            "rng_seed": self.rng_seed,
            "calibrate": self.calibrate,
        }


@dataclass(frozen=True)
class GroundTruth:
    """
    What the saboteur knows about an instance.

    key_constraints are the rows the saboteur corrupted (or planted);
    fix is the edit list that restores the original feasible region.
    alternative_fixes holds other verified single-edit repairs (Type I).
    """
    key_constraints: Tuple[str, ...]
    fix: Tuple[ModelEdit, ...]
    iis_gt: IisReport
    original_objective: float
    alternative_fixes: Tuple[Tuple[ModelEdit, ...], ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "key_constraints": list(self.key_constraints),
            "fix": [e.to_dict() for e in self.fix],
            "iis": self.iis_gt.to_list(),
            "original_objective": self.original_objective,
            "alternative_fixes": [[e.to_dict() for e in alt] for alt in self.alternative_fixes],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GroundTruth":
        try:
            return cls(
                key_constraints=tuple(data["key_constraints"]),
                fix=tuple(ModelEdit.from_dict(e) for e in data["fix"]),
                iis_gt=IisReport(tuple(data["iis"])),
                original_objective=parse_number(data["original_objective"],
                                                "ground_truth.original_objective"),
                alternative_fixes=tuple(tuple(ModelEdit.from_dict(e) for e in alt)
                                        for alt in data.get("alternative_fixes", [])),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError("Malformed ground truth", reason=str(exc))


@dataclass(frozen=True)
class BenchmarkInstance:
    id: str
    error_type: ErrorType
    original: LpModel
    sabotaged: LpModel
    ground_truth: GroundTruth
    difficulty: Difficulty
    root_cause: Optional[str] = None
    cascade: Optional[GroundTruth] = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def problem_nl(self) -> str:
        return self.sabotaged.description or ""

    def all_fixes(self) -> Tuple[ModelEdit, ...]:
        """Primary fix followed by the cascade fix, if any."""
        if self.cascade is None:
            return self.ground_truth.fix
        return self.ground_truth.fix + self.cascade.fix

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "error_type": self.error_type.value,
            "difficulty": self.difficulty.value,
            "original": model_to_dict(self.original),
            "sabotaged": model_to_dict(self.sabotaged),
            "ground_truth": self.ground_truth.to_dict(),
            "root_cause": self.root_cause,
            "cascade": self.cascade.to_dict() if self.cascade is not None else None,
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BenchmarkInstance":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaError("Unsupported schema_version", field="schema_version",
                              value=repr(version))
        try:
            cascade = data.get("cascade")
            return cls(
                id=data["id"],
                error_type=ErrorType(data["error_type"]),
                original=model_from_dict(data["original"]),
                sabotaged=model_from_dict(data["sabotaged"]),
                ground_truth=GroundTruth.from_dict(data["ground_truth"]),
                difficulty=Difficulty(data["difficulty"]),
                root_cause=data.get("root_cause"),
                cascade=GroundTruth.from_dict(cascade) if cascade is not None else None,
                metadata=dict(data.get("metadata") or {}),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError("Malformed benchmark instance", reason=str(exc))


def dump_instance(inst: BenchmarkInstance) -> str:
    return dumps_canonical(inst.to_dict())


def write_benchmark(path: str, instances: Iterable[BenchmarkInstance]) -> int:
    """Write one canonical JSON line per instance; returns the count."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(dump_instance(inst) + "\n")
            count += 1
    logger.info("wrote %d instances to %s", count, path)
    return count


def read_benchmark(path: str) -> List[BenchmarkInstance]:
    """
    Read a benchmark JSONL file.

    Raises:
        SchemaError: a line is not valid JSON or not a valid instance
    """
    instances = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError("Invalid JSON line", path=path, line=lineno, reason=str(exc))
            instances.append(BenchmarkInstance.from_dict(data))
    return instances
