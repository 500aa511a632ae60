"""
Run manifests.

Every CLI run writes a manifest next to its main output. It records what
is needed to reproduce the run (tool version, master seed and derived
sub-seeds, configuration with its digest, input and output file digests)
plus wall-clock timestamps, which never enter the outputs themselves.
"""

import hashlib
import logging
import os
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Mapping, Optional

from . import __version__
from .lp import SCHEMA_VERSION, dumps_canonical
from .seeding import named_seed

logger = logging.getLogger(__name__)

SEED_STREAMS = ("pool", "generation", "sampling", "simulator", "agents", "bias")


def file_digest(path: str) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            sha.update(chunk)
    return sha.hexdigest()


def config_digest(config: Mapping[str, Any]) -> str:
    return hashlib.sha256(dumps_canonical(dict(config)).encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    argv: List[str]
    seed: int
    config: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    stats: Dict[str, Any] = field(default_factory=dict)
    started_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None
    exit_code: Optional[int] = None

    @property
    def seeds(self) -> Dict[str, int]:
        return {stream: named_seed(self.seed, stream) for stream in SEED_STREAMS}

    def add_inputs(self, paths: Iterable[str]) -> None:
        for path in paths:
            self.inputs[path] = file_digest(path)

    def add_outputs(self, paths: Iterable[str]) -> None:
        for path in paths:
            self.outputs[path] = file_digest(path)

    def finish(self, exit_code: int) -> None:
        self.exit_code = exit_code
        self.finished_at = _now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "python": platform.python_version(),
            "command": self.command,
            "argv": list(self.argv),
            "seed": self.seed,
            "seeds": self.seeds,
            "config": self.config,
            "config_digest": config_digest(self.config),
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "stats": self.stats,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "exit_code": self.exit_code,
        }

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps_canonical(self.to_dict()) + "\n")
        logger.info("manifest written to %s", path)


def manifest_path_for(output: str) -> str:
    """'bench.jsonl' -> 'bench.manifest.json'."""
    stem, _ = os.path.splitext(output)
    return stem + ".manifest.json"
