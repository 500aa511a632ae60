"""
ID/OOD evaluation splits and curriculum presets.

Inside every level the scenarios are spread evenly over the CR buckets
the level's range touches, so the CR histogram of a level never differs
from its uniform target by more than one scenario.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..exceptions import InvariantError, SchemaError
from ..seeding import stream_rng
from .scenario import (CR_EDGE_MARGIN, LEVEL_CR_RANGES, CrRange, NewsvendorScenario,
                       dump_scenario, generate_scenario)

logger = logging.getLogger(__name__)

CR_BUCKETS: Tuple[Tuple[str, float, float], ...] = (
    ("very_low", 0.0, 0.2),
    ("low", 0.2, 0.4),
    ("neutral", 0.4, 0.6),
    ("high", 0.6, 0.8),
    ("very_high", 0.8, 1.0),
)

ID_LEVELS = (1, 2, 3, 4)
OOD_LEVELS = (3, 4)
OOD_CR_LIMIT = (0.10, 0.89)

# Training curriculum: CR ranges by stage, with sample counts.
CURRICULUM_STAGES: Dict[int, Tuple[CrRange, int]] = {
    1: (((0.1, 0.1), (0.9, 0.9)), 200),
    2: (((0.15, 0.25), (0.75, 0.85)), 300),
    3: (((0.2, 0.8),), 400),
}
CURRICULUM_PRESETS = ("levels", "stages")


@dataclass(frozen=True)
class BiasConfig:
    n_id: int = 400
    n_ood: int = 200
    mc_draws: int = 1_000_000
    grid_points: int = 401

    def __post_init__(self):
        if self.n_id < 0 or self.n_id % len(ID_LEVELS):
            raise InvariantError("n_id must be a non-negative multiple of 4", n_id=self.n_id)
        if self.n_ood < 0 or self.n_ood % len(OOD_LEVELS):
            raise InvariantError("n_ood must be a non-negative multiple of 2", n_ood=self.n_ood)
        if self.mc_draws < 1000 or self.grid_points < 3:
            raise InvariantError("Monte-Carlo settings too small",
                                 mc_draws=self.mc_draws, grid_points=self.grid_points)

    def to_dict(self) -> Dict[str, Any]:
        return {"n_id": self.n_id, "n_ood": self.n_ood, "mc_draws": self.mc_draws,
                "grid_points": self.grid_points}


@dataclass
class BiasDataset:
    id: List[NewsvendorScenario]
    ood: List[NewsvendorScenario]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def scenarios(self) -> List[NewsvendorScenario]:
        return self.id + self.ood


def cr_bucket(cr: float) -> str:
    for name, lo, hi in CR_BUCKETS:
        if lo <= cr < hi:
            return name
    return CR_BUCKETS[-1][0]


def _clip(cr_range: CrRange, lo: float, hi: float) -> CrRange:
    parts = []
    for a, b in cr_range:
        a, b = max(a, lo), min(b, hi)
        if b - a > 2 * CR_EDGE_MARGIN:
            parts.append((a, b))
    return tuple(parts)


def level_buckets(level: int, limit: Optional[Tuple[float, float]] = None
                  ) -> List[Tuple[str, CrRange]]:
    """CR buckets touched by a level's range (optionally clipped to `limit`)."""
    cr_range = LEVEL_CR_RANGES[level]
    if limit is not None:
        cr_range = _clip(cr_range, *limit)
    buckets = []
    for name, lo, hi in CR_BUCKETS:
        part = _clip(cr_range, lo, hi)
        if part:
            buckets.append((name, part))
    return buckets


def build_level(level: int, n: int, split: str, seed: int,
                limit: Optional[Tuple[float, float]] = None) -> List[NewsvendorScenario]:
    """n scenarios of one level, spread evenly over its CR buckets."""
    buckets = level_buckets(level, limit)
    base, extra = divmod(n, len(buckets))
    scenarios = []
    index = 0
    for b, (_, cr_range) in enumerate(buckets):
        for _ in range(base + (1 if b < extra else 0)):
            rng = stream_rng(seed, f"bias:{split}:L{level}", index)
            scenarios.append(generate_scenario(cr_range, level, rng,
                                               f"{split.lower()}-l{level}-{index:04d}", split))
            index += 1
    return scenarios


def _cr_span(scenarios: Sequence[NewsvendorScenario]) -> Optional[List[float]]:
    if not scenarios:
        return None
    crs = [sc.cr for sc in scenarios]
    return [min(crs), max(crs)]


def build_splits(n_id: int, n_ood: int, seed: int) -> BiasDataset:
    """
    ID: equal counts of levels 1-4. OOD: levels 3 and 4 only, with CR
    kept inside [0.10, 0.89]. Realized CR spans go into the metadata.
    """
    cfg = BiasConfig(n_id=n_id, n_ood=n_ood)
    id_set: List[NewsvendorScenario] = []
    for level in ID_LEVELS:
        id_set += build_level(level, cfg.n_id // len(ID_LEVELS), "ID", seed)
    ood_set: List[NewsvendorScenario] = []
    for level in OOD_LEVELS:
        ood_set += build_level(level, cfg.n_ood // len(OOD_LEVELS), "OOD", seed, OOD_CR_LIMIT)

    metadata = {
        "seed": seed,
        "n_id": n_id,
        "n_ood": n_ood,
        "id_cr_span": _cr_span(id_set),
        "ood_cr_span": _cr_span(ood_set),
        "id_levels": {str(l): sum(1 for s in id_set if s.level == l) for l in ID_LEVELS},
        "ood_levels": {str(l): sum(1 for s in ood_set if s.level == l) for l in OOD_LEVELS},
    }
    logger.info("built bias splits: %d ID, %d OOD", len(id_set), len(ood_set))
    return BiasDataset(id_set, ood_set, metadata)


def build_curriculum(preset: str, seed: int, per_level: int = 100) -> List[NewsvendorScenario]:
    """
    Training scenarios for a curriculum preset.

    "levels" emits per_level scenarios for each of levels 1-4. "stages"
    emits the staged extreme/boundary/full schedule with clean prompts;
    each scenario records its stage.
    """
    if preset == "levels":
        scenarios = []
        for level in ID_LEVELS:
            scenarios += build_level(level, per_level, "TRAIN", seed)
        return scenarios
    if preset == "stages":
        scenarios = []
        for stage, (cr_range, count) in sorted(CURRICULUM_STAGES.items()):
            for index in range(count):
                rng = stream_rng(seed, f"bias:TRAIN:S{stage}", index)
                scenarios.append(generate_scenario(cr_range, 1, rng,
                                                   f"train-s{stage}-{index:04d}", "TRAIN", stage))
        return scenarios
    raise InvariantError("Unknown curriculum preset", preset=preset,
                         choices=list(CURRICULUM_PRESETS))


def write_scenarios(path: str, scenarios: Sequence[NewsvendorScenario]) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sc in scenarios:
            fh.write(dump_scenario(sc) + "\n")
    logger.info("wrote %d scenarios to %s", len(scenarios), path)
    return len(scenarios)


def read_scenarios(path: str) -> List[NewsvendorScenario]:
    """
    Raises:
        SchemaError: invalid JSON or scenario
    """
    scenarios = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError("Invalid JSON", path=path, line=lineno, reason=exc.msg)
            scenarios.append(NewsvendorScenario.from_dict(data))
    return scenarios
