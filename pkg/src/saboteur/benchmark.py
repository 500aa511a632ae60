"""
Benchmark generation: inject, validate, regenerate, label.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import InjectionFailure, PoolExhausted
from ..lp import LpModel
from ..seeding import named_seed
from ..solver import DEFAULT_CONFIG, SolverConfig
from .error_types import Difficulty, ErrorType, difficulty_for
from .injectors import inject
from .instance import BenchmarkInstance, SabotageConfig
from .validation import FourFoldValidator

logger = logging.getLogger(__name__)


def assign_difficulty(inst: BenchmarkInstance) -> Difficulty:
    """Tier from the size of the instance's ground-truth IIS."""
    return difficulty_for(inst.ground_truth.iis_gt.size, inst.error_type)


def parse_counts(text: str) -> Dict[ErrorType, int]:
    """Parse "A=50,B=50" into a count map."""
    counts: Dict[ErrorType, int] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        code, _, number = part.partition("=")
        counts[ErrorType(code.strip().upper())] = int(number)
    return counts


def _slots(counts: Mapping[ErrorType, int]) -> List[Tuple[int, ErrorType, int]]:
    """(global index, type, per-type index) in type order."""
    slots = []
    for error_type in sorted(counts, key=lambda t: t.value):
        for n in range(counts[error_type]):
            slots.append((len(slots), error_type, n))
    return slots


def _generate_one(pool: Sequence[LpModel], slot: Tuple[int, ErrorType, int],
                  cfg: SabotageConfig, config: SolverConfig) -> Optional[BenchmarkInstance]:
    index, error_type, n = slot
    seed = named_seed(cfg.rng_seed, "generation") ^ index
    validator = FourFoldValidator(config)
    # attempts walk consecutive pool models from a seeded start
    start = int(np.random.default_rng(seed).integers(len(pool)))
    for attempt in range(cfg.max_regenerations + 1):
        rng = np.random.default_rng((seed, attempt))
        pool_index = (start + attempt) % len(pool)
        try:
            result = inject(pool[pool_index], error_type, cfg, rng, config)
        except InjectionFailure as exc:
            logger.debug("slot %d attempt %d: %s", index, attempt, exc)
            continue
        inst = BenchmarkInstance(
            id=f"{error_type.value}_{n:04d}",
            error_type=error_type,
            original=result.original,
            sabotaged=result.sabotaged,
            ground_truth=result.ground_truth,
            difficulty=Difficulty.EASY,
            root_cause=result.root_cause,
            cascade=result.cascade,
            metadata={"attempts": attempt + 1, "pool_index": pool_index, **result.details},
        )
        size = inst.ground_truth.iis_gt.size
        if cfg.calibrate and not error_type.info.in_range(size):
            logger.debug("slot %d attempt %d: IIS size %d outside %s", index, attempt, size,
                         error_type.info.target_iis_range)
            continue
        report = validator.check(inst)
        if not report.passed:
            logger.debug("slot %d attempt %d rejected: %s", index, attempt, report)
            continue
        return replace(inst, difficulty=assign_difficulty(inst))
    return None


def generate_benchmark(pool: Sequence[LpModel], counts: Mapping[ErrorType, int],
                       cfg: SabotageConfig = SabotageConfig(),
                       config: SolverConfig = DEFAULT_CONFIG,
                       workers: int = 1) -> List[BenchmarkInstance]:
    """
    Generate validated instances for every requested error type.

    Each slot draws from its own RNG stream (generation seed XOR slot
    index), so the output does not depend on the number of workers.

    Raises:
        PoolExhausted: some slots failed after max_regenerations retries
    """
    if not pool:
        raise PoolExhausted({t.value: c for t, c in counts.items() if c > 0})
    slots = _slots(counts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda s: _generate_one(pool, s, cfg, config), slots))
    else:
        results = [_generate_one(pool, s, cfg, config) for s in slots]

    shortfall = Counter(slot[1].value for slot, inst in zip(slots, results) if inst is None)
    if shortfall:
        raise PoolExhausted(dict(sorted(shortfall.items())))
    logger.info("generated %d instances", len(results))
    return results


def generation_stats(instances: Sequence[BenchmarkInstance]) -> Dict[str, Any]:
    """Attempts per type, Type C tiers and the difficulty histogram."""
    attempts: Dict[str, List[int]] = {}
    tiers: Counter = Counter()
    difficulty: Counter = Counter()
    for inst in instances:
        attempts.setdefault(inst.error_type.value, []).append(int(inst.metadata.get("attempts", 1)))
        if "tier" in inst.metadata:
            tiers[str(inst.metadata["tier"])] += 1
        difficulty[inst.difficulty.value] += 1
    return {
        "instances": len(instances),
        "mean_attempts": {t: sum(a) / len(a) for t, a in sorted(attempts.items())},
        "first_try_rate": (sum(1 for inst in instances if inst.metadata.get("attempts", 1) == 1)
                           / len(instances)) if instances else 0.0,
        "type_c_tiers": dict(sorted(tiers.items())),
        "difficulty": dict(sorted(difficulty.items())),
    }
