"""
Decision parsing and bias metrics.

Bias Diff is |E[Q/Q* | CR > 0.5] - E[Q/Q* | CR < 0.5]| in percent, taken
over rational decisions only. Pull-to-center ordering drives the first
mean below 1 and the second above 1.
"""

import json
import logging
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from ..exceptions import InvariantError, SchemaError
from ..lp import SCHEMA_VERSION, dumps_canonical
from .scenario import NewsvendorScenario, infer_params_from_percentiles
from .splits import CR_BUCKETS, cr_bucket

logger = logging.getLogger(__name__)

_ASSIGNMENT = re.compile(r"\bQ\s*[=:]\s*(-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)", re.IGNORECASE)
_LONE_NUMBER = re.compile(r"^\s*(-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*$")
_JSON_KEYS = ("q", "Q", "order_quantity", "quantity")


@dataclass(frozen=True)
class Decision:
    scenario_id: str
    q: Optional[float]
    raw_response: str

    @property
    def rational(self) -> bool:
        return self.q is not None and math.isfinite(self.q) and self.q >= 0.0


def _number(value: Any) -> Optional[float]:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def parse_decision(scenario_id: str, response: Any) -> Decision:
    """
    Order quantity from an agent response.

    Accepts a number, JSON {"q": n}, "Q = n" anywhere in the text, or a
    lone number. Anything else yields q=None.
    """
    raw = response if isinstance(response, str) else json.dumps(response)
    if isinstance(response, (int, float)) and not isinstance(response, bool):
        return Decision(scenario_id, float(response), raw)
    if isinstance(response, Mapping):
        data = response
    else:
        try:
            data = json.loads(raw)
        except (json.JSONDecodeError, TypeError):
            data = None
    if isinstance(data, Mapping):
        for key in _JSON_KEYS:
            if key in data:
                return Decision(scenario_id, _number(data[key]), raw)
    elif _number(data) is not None:
        return Decision(scenario_id, _number(data), raw)

    match = _LONE_NUMBER.match(raw) or _ASSIGNMENT.search(raw)
    return Decision(scenario_id, float(match.group(1)) if match else None, raw)


def read_decisions(path: str) -> List[Decision]:
    """
    Decisions JSONL: {"scenario_id": ..., "response": ...} per line.

    Raises:
        SchemaError: invalid JSON or missing fields
    """
    decisions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                decisions.append(parse_decision(str(data["scenario_id"]), data["response"]))
            except json.JSONDecodeError as exc:
                raise SchemaError("Invalid JSON", path=path, line=lineno, reason=exc.msg)
            except (KeyError, TypeError) as exc:
                raise SchemaError("Malformed decision", path=path, line=lineno, reason=str(exc))
    return decisions


def write_decisions(path: str, responses: Mapping[str, Any]) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for scenario_id, response in responses.items():
            fh.write(dumps_canonical({"schema_version": SCHEMA_VERSION,
                                      "scenario_id": scenario_id, "response": response}) + "\n")
    return len(responses)


# --- built-in policies ---------------------------------------------------------

def oracle_policy(sc: NewsvendorScenario) -> str:
    return json.dumps({"q": sc.q_opt})


def mean_policy(sc: NewsvendorScenario) -> str:
    """Orders the (inferred) mean demand regardless of costs."""
    if sc.censored:
        mu, _ = infer_params_from_percentiles(*sc.percentiles)
    else:
        mu = sc.mu
    return json.dumps({"q": mu})


POLICIES = {"oracle": oracle_policy, "mean": mean_policy}


# --- report ----------------------------------------------------------------------

@dataclass
class BiasReport:
    """Percent values except the per-bucket ratio means."""
    rationality: float
    bias_diff: float
    per_cr_bucket: Dict[str, Optional[float]]
    id_bias: float
    ood_bias: float
    drift: float
    decisions: int
    rational: int
    per_split: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "rationality": self.rationality,
            "bias_diff": self.bias_diff,
            "per_cr_bucket": dict(self.per_cr_bucket),
            "id_bias": self.id_bias,
            "ood_bias": self.ood_bias,
            "drift": self.drift,
            "decisions": self.decisions,
            "rational": self.rational,
            "per_split": self.per_split,
        }


def _ratio_means(pairs: Sequence[tuple]) -> Dict[str, Optional[float]]:
    groups: Dict[str, List[float]] = defaultdict(list)
    for sc, ratio in pairs:
        groups[cr_bucket(sc.cr)].append(ratio)
    return {name: (float(np.mean(groups[name])) if groups[name] else None)
            for name, _, _ in CR_BUCKETS}


def bias_diff(pairs: Sequence[tuple]) -> float:
    """
    100 * |mean ratio over CR > 0.5 - mean ratio over CR < 0.5|.

    0 when either side has no rational decision.
    """
    high = [r for sc, r in pairs if sc.cr > 0.5]
    low = [r for sc, r in pairs if sc.cr < 0.5]
    if not high or not low:
        return 0.0
    return 100.0 * abs(float(np.mean(high)) - float(np.mean(low)))


def evaluate_bias(decisions: Iterable[Decision],
                  scenarios: Sequence[NewsvendorScenario]) -> BiasReport:
    """
    Raises:
        InvariantError: a decision names an unknown scenario
    """
    by_id = {sc.id: sc for sc in scenarios}
    decisions = list(decisions)
    pairs = []
    for d in decisions:
        if d.scenario_id not in by_id:
            raise InvariantError("Decision for unknown scenario", scenario_id=d.scenario_id)
        if d.rational:
            sc = by_id[d.scenario_id]
            pairs.append((sc, d.q / sc.q_opt))

    per_split: Dict[str, Dict[str, Any]] = {}
    for split in sorted({sc.split for sc in scenarios}):
        split_pairs = [(sc, r) for sc, r in pairs if sc.split == split]
        split_total = sum(1 for d in decisions if by_id[d.scenario_id].split == split)
        per_split[split] = {
            "decisions": split_total,
            "rationality": 100.0 * len(split_pairs) / split_total if split_total else 0.0,
            "bias_diff": bias_diff(split_pairs),
        }

    id_bias = per_split.get("ID", {}).get("bias_diff", 0.0)
    ood_bias = per_split.get("OOD", {}).get("bias_diff", 0.0)
    total = len(decisions)
    return BiasReport(
        rationality=100.0 * len(pairs) / total if total else 0.0,
        bias_diff=bias_diff(pairs),
        per_cr_bucket=_ratio_means(pairs),
        id_bias=id_bias,
        ood_bias=ood_bias,
        drift=ood_bias - id_bias,
        decisions=total,
        rational=len(pairs),
        per_split=per_split,
    )


def format_bias_report(report: BiasReport) -> str:
    lines = [
        "=" * 80,
        "Bias report",
        "=" * 80,
        f"Decisions:    {report.decisions} ({report.rational} rational)",
        f"Rationality:  {report.rationality:.1f}%",
        f"Bias Diff:    {report.bias_diff:.1f}%",
        f"ID bias:      {report.id_bias:.1f}%",
        f"OOD bias:     {report.ood_bias:.1f}%",
        f"Drift:        {report.drift:+.1f}%",
        "-" * 80,
        f"{'CR bucket':<12} {'mean Q/Q*':>10}",
    ]
    for name, value in report.per_cr_bucket.items():
        lines.append(f"{name:<12} {('-' if value is None else f'{value:.3f}'):>10}")
    lines.append("=" * 80)
    return "\n".join(lines)
