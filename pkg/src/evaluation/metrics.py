"""
Benchmark metrics over episode records.

Recovery is judged per instance across its K attempts: an instance
counts toward RR when any attempt succeeded (Full or Partial) and toward
RR@k when some attempt reached a Full Success within k steps.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import EmptyInput
from .records import EpisodeRecord

DEFAULT_K = 5


@dataclass
class MetricsTable:
    """Percentages are in [0, 100]; op_mean and avg_steps are plain numbers."""
    rr: float
    rr_at_k: Dict[int, float]
    da_mean: float
    op_mean: float
    avg_steps: float
    instances: int
    episodes: int
    protocol_errors: int
    per_error_type: Dict[str, "MetricsTable"] = field(default_factory=dict)
    per_difficulty: Dict[str, "MetricsTable"] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rr": self.rr,
            "rr_at_k": {str(k): v for k, v in self.rr_at_k.items()},
            "da_mean": self.da_mean,
            "op_mean": self.op_mean,
            "avg_steps": self.avg_steps,
            "instances": self.instances,
            "episodes": self.episodes,
            "protocol_errors": self.protocol_errors,
            "per_error_type": {k: v.to_dict() for k, v in self.per_error_type.items()},
            "per_difficulty": {k: v.to_dict() for k, v in self.per_difficulty.items()},
        }


def _mean(values: List[float]) -> float:
    return float(np.mean(values)) if values else 0.0


def _summarize(records: Sequence[EpisodeRecord], k_max: int) -> MetricsTable:
    by_instance: Dict[str, List[EpisodeRecord]] = defaultdict(list)
    for record in records:
        by_instance[record.instance_id].append(record)

    recovered = 0
    best_full: List[Optional[int]] = []
    for attempts in by_instance.values():
        if any(r.success for r in attempts):
            recovered += 1
        full_steps = [r.first_success_step for r in attempts if r.full_success]
        best_full.append(min(full_steps) if full_steps else None)

    n = len(by_instance)
    rr_at_k = {k: 100.0 * sum(1 for s in best_full if s is not None and s <= k) / n
               for k in range(1, k_max + 1)}
    successes = [r for r in records if r.success]
    return MetricsTable(
        rr=100.0 * recovered / n,
        rr_at_k=rr_at_k,
        da_mean=100.0 * _mean([r.da for r in records]),
        op_mean=_mean([r.op for r in successes]),
        avg_steps=_mean([float(r.repair_steps) for r in successes]),
        instances=n,
        episodes=len(records),
        protocol_errors=sum(1 for r in records if r.protocol_error),
    )


def _breakdown(records: Sequence[EpisodeRecord], key: Callable[[EpisodeRecord], str],
               k_max: int) -> Dict[str, MetricsTable]:
    groups: Dict[str, List[EpisodeRecord]] = defaultdict(list)
    for record in records:
        groups[key(record)].append(record)
    return {name: _summarize(groups[name], k_max) for name in sorted(groups)}


def compute_metrics(records: Sequence[EpisodeRecord], k_max: int = DEFAULT_K) -> MetricsTable:
    """
    RR, RR@1..k_max, DA, OP and repair steps with per-type and
    per-difficulty breakdowns.

    Raises:
        EmptyInput: no records
    """
    if not records:
        raise EmptyInput("compute_metrics needs at least one record")
    table = _summarize(records, k_max)
    table.per_error_type = _breakdown(records, lambda r: r.error_type, k_max)
    table.per_difficulty = _breakdown(records, lambda r: r.difficulty, k_max)
    return table


def _row(label: str, t: MetricsTable, k: int) -> str:
    rr_k = t.rr_at_k.get(k, 0.0)
    return (f"{label:<12} {t.instances:>6} {t.rr:>7.1f} {rr_k:>7.1f} "
            f"{t.da_mean:>7.1f} {t.op_mean:>6.3f} {t.avg_steps:>6.2f}")


def format_table(table: MetricsTable, title: str = "Evaluation report") -> str:
    """Fixed-width text table with RR, RR@k, DA, OP and Steps columns."""
    k = max(table.rr_at_k) if table.rr_at_k else DEFAULT_K
    header = f"{'Group':<12} {'N':>6} {'RR':>7} {f'RR@{k}':>7} {'DA':>7} {'OP':>6} {'Steps':>6}"
    lines = ["=" * 80, title, "=" * 80, header, "-" * len(header), _row("all", table, k)]
    if table.per_error_type:
        lines.append("-" * len(header))
        lines.extend(_row(f"type {name}", t, k) for name, t in table.per_error_type.items())
    if table.per_difficulty:
        lines.append("-" * len(header))
        lines.extend(_row(name, t, k) for name, t in table.per_difficulty.items())
    lines.append("=" * 80)
    lines.append(f"episodes: {table.episodes}   protocol errors: {table.protocol_errors}")
    return "\n".join(lines)
