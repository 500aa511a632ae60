"""Deterministic stratified sampling of benchmark instances."""

from collections import defaultdict
from typing import Callable, Dict, List, Mapping, Sequence

from ..exceptions import InsufficientPool, InvariantError
from ..saboteur import BenchmarkInstance, ErrorType
from ..seeding import stream_rng

# Evaluation tiers by error type (A-D easy, E-G hard, H-I expert).
TYPE_TIERS: Dict[ErrorType, str] = {t: t.info.tier.value for t in ErrorType}

TIER_PRESET: Dict[str, int] = {"easy": 180, "hard": 158, "expert": 112}
TYPE_PRESET: Dict[str, int] = {t.value: 50 for t in ErrorType}
PRESETS = {"tiers": ("tier", TIER_PRESET), "types": ("type", TYPE_PRESET)}

STRATUM_KEYS: Dict[str, Callable[[BenchmarkInstance], str]] = {
    "tier": lambda inst: TYPE_TIERS[inst.error_type],
    "type": lambda inst: inst.error_type.value,
    "difficulty": lambda inst: inst.difficulty.value,
}


def stratified_sample(bench: Sequence[BenchmarkInstance], counts: Mapping[str, int],
                      seed: int, key: str = "tier") -> List[BenchmarkInstance]:
    """
    Draw exactly counts[s] instances from every stratum s without
    replacement. The result keeps benchmark order.

    Raises:
        InsufficientPool: a stratum holds fewer instances than requested
        InvariantError: unknown stratum key
    """
    if key not in STRATUM_KEYS:
        raise InvariantError("Unknown stratum key", key=key, choices=sorted(STRATUM_KEYS))
    stratum_of = STRATUM_KEYS[key]
    members: Dict[str, List[int]] = defaultdict(list)
    for index, inst in enumerate(bench):
        members[stratum_of(inst)].append(index)

    rng = stream_rng(seed, "sampling")
    chosen: List[int] = []
    for stratum in sorted(counts):
        wanted = counts[stratum]
        available = members.get(stratum, [])
        if wanted > len(available):
            raise InsufficientPool(stratum, wanted, len(available))
        if wanted <= 0:
            continue
        picks = rng.choice(len(available), size=wanted, replace=False)
        chosen.extend(available[int(i)] for i in picks)
    return [bench[i] for i in sorted(chosen)]


def parse_strata(text: str) -> Dict[str, int]:
    """'easy=180,hard=158' -> {'easy': 180, 'hard': 158}."""
    counts: Dict[str, int] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, _, value = part.partition("=")
        try:
            counts[name.strip()] = int(value)
        except ValueError:
            raise InvariantError("Bad stratum count", item=part)
    return counts
