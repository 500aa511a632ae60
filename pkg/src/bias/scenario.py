"""
Newsvendor scenarios: generation with a target critical ratio, the
closed-form optimal order, percentile censoring and prompt rendering.
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from ..exceptions import InvariantError, NonMonotonePercentiles, SchemaError
from ..lp import SCHEMA_VERSION, dumps_canonical
from .normal import inv_norm_cdf

# (lo, hi) intervals; a scenario's CR is drawn from their union.
CrRange = Tuple[Tuple[float, float], ...]

PRICE_RANGE = (10.0, 100.0)
SALVAGE_FRACTION = 0.3
MU_RANGE = (50.0, 200.0)
SIGMA_RANGE = (10.0, 50.0)
IQR_CONSTANT = 1.35
PERCENTILE_LEVELS = (0.25, 0.5, 0.75)
CR_EDGE_MARGIN = 0.002

LEVEL_CR_RANGES: Dict[int, CrRange] = {
    1: ((0.4, 0.6),),
    2: ((0.05, 0.2), (0.8, 0.95)),
    3: ((0.3, 0.7),),
    4: ((0.1, 0.9),),
}
DISTRACTOR_LEVEL = 3
CENSORED_LEVEL = 4

# Context that does not change the single-period optimal order.
DISTRACTOR_TEMPLATES: Dict[str, str] = {
    "warehouse_capacity": "Storage limit: {units} units",
    "competitor_pricing": "Competitor sells at ${price:.2f}",
    "shelf_life": "Product expires in {days} days",
    "historical_trend": "Sales grew {growth}% last year",
    "seasonal_factor": "Holiday season approaching",
}


@dataclass(frozen=True)
class NewsvendorScenario:
    """
    One single-period ordering decision with normal demand.

    mu and sigma are the true demand parameters. For censored (level 4)
    scenarios the prompt shows only the percentiles and mu/sigma are kept
    under "hidden" when serialized.
    """
    id: str
    level: int
    price: float
    cost: float
    salvage: float
    mu: float
    sigma: float
    cr: float
    q_opt: float
    split: str = "ID"
    distractors: Tuple[str, ...] = ()
    percentiles: Optional[Tuple[float, float, float]] = None
    stage: Optional[int] = None

    def __post_init__(self):
        if self.level not in LEVEL_CR_RANGES:
            raise InvariantError("level must be 1..4", level=self.level)
        if not self.salvage < self.cost < self.price:
            raise InvariantError("Need salvage < cost < price", id=self.id,
                                 price=self.price, cost=self.cost, salvage=self.salvage)
        if self.sigma <= 0:
            raise InvariantError("sigma must be positive", id=self.id)

    @property
    def censored(self) -> bool:
        return self.percentiles is not None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "level": self.level,
            "split": self.split,
            "price": self.price,
            "cost": self.cost,
            "salvage": self.salvage,
            "cr": self.cr,
            "q_opt": self.q_opt,
        }
        if self.censored:
            data["percentiles"] = list(self.percentiles)
            data["hidden"] = {"mu": self.mu, "sigma": self.sigma}
        else:
            data["mu"] = self.mu
            data["sigma"] = self.sigma
        data["distractors"] = list(self.distractors)
        data["stage"] = self.stage
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NewsvendorScenario":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError("Unsupported schema_version", field="schema_version",
                              value=repr(data.get("schema_version")))
        try:
            demand = data["hidden"] if "hidden" in data else data
            percentiles = data.get("percentiles")
            return cls(
                id=data["id"],
                level=int(data["level"]),
                price=float(data["price"]),
                cost=float(data["cost"]),
                salvage=float(data["salvage"]),
                mu=float(demand["mu"]),
                sigma=float(demand["sigma"]),
                cr=float(data["cr"]),
                q_opt=float(data["q_opt"]),
                split=data.get("split", "ID"),
                distractors=tuple(data.get("distractors") or ()),
                percentiles=tuple(float(p) for p in percentiles) if percentiles else None,
                stage=data.get("stage"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError("Malformed scenario", reason=str(exc))


def critical_ratio(price: float, cost: float, salvage: float) -> float:
    return (price - cost) / (price - salvage)


def optimal_q(sc: NewsvendorScenario) -> float:
    """mu + sigma * Phi^-1(CR), always from the true demand parameters."""
    return sc.mu + sc.sigma * inv_norm_cdf(sc.cr)


def demand_percentiles(mu: float, sigma: float) -> Tuple[float, float, float]:
    """(P25, P50, P75) rounded to cents; P50 is mu itself."""
    z25, _, z75 = (inv_norm_cdf(q) for q in PERCENTILE_LEVELS)
    return round(mu + sigma * z25, 2), round(mu, 2), round(mu + sigma * z75, 2)


def infer_params_from_percentiles(p25: float, p50: float, p75: float) -> Tuple[float, float]:
    """
    (mu_hat, sigma_hat) = (P50, (P75 - P25) / 1.35).

    Raises:
        NonMonotonePercentiles: not P25 < P50 < P75
    """
    if not p25 < p50 < p75:
        raise NonMonotonePercentiles((p25, p50, p75))
    return p50, (p75 - p25) / IQR_CONSTANT


def sample_cr(cr_range: CrRange, rng: np.random.Generator,
              margin: float = CR_EDGE_MARGIN) -> float:
    """
    Uniform draw from the union of intervals, kept `margin` away from the
    interval edges so that price rounding cannot push CR across them.
    Degenerate intervals (lo == hi) are picked uniformly and returned as-is.
    """
    if not cr_range:
        raise InvariantError("Empty CR range")
    for lo, hi in cr_range:
        if not 0.0 < lo <= hi < 1.0:
            raise InvariantError("CR range must lie in (0, 1)", lo=lo, hi=hi)
    lengths = np.array([hi - lo for lo, hi in cr_range])
    if lengths.sum() <= 0.0:
        lo, _ = cr_range[int(rng.integers(len(cr_range)))]
        return lo
    lo, hi = cr_range[int(rng.choice(len(cr_range), p=lengths / lengths.sum()))]
    m = min(margin, (hi - lo) / 4.0)
    return float(rng.uniform(lo + m, hi - m))


def _distractor(rng: np.random.Generator) -> str:
    kind = sorted(DISTRACTOR_TEMPLATES)[int(rng.integers(len(DISTRACTOR_TEMPLATES)))]
    return DISTRACTOR_TEMPLATES[kind].format(
        units=int(rng.integers(2, 11)) * 100,
        price=float(rng.integers(10, 100)),
        days=int(rng.integers(2, 13)) * 5,
        growth=int(rng.integers(3, 21)),
    )


def generate_scenario(cr_range: CrRange, level: int, rng: np.random.Generator,
                      scenario_id: str = "", split: str = "ID",
                      stage: Optional[int] = None) -> NewsvendorScenario:
    """
    Draw CR, price and salvage, derive the cost from CR, then draw demand.

    Prices are rounded to cents and CR is recomputed from the rounded
    prices. mu and sigma are rounded to one decimal and redrawn until the
    optimal order is positive. Level 3 adds one distractor line, level 4
    replaces (mu, sigma) in the prompt with demand percentiles.
    """
    if level not in LEVEL_CR_RANGES:
        raise InvariantError("level must be 1..4", level=level)
    target = sample_cr(cr_range, rng)
    price = round(float(rng.uniform(*PRICE_RANGE)), 2)
    salvage = round(float(rng.uniform(0.0, SALVAGE_FRACTION * price)), 2)
    cost = round(price - target * (price - salvage), 2)
    cr = critical_ratio(price, cost, salvage)

    z = inv_norm_cdf(cr)
    while True:
        mu = round(float(rng.uniform(*MU_RANGE)), 1)
        sigma = round(float(rng.uniform(*SIGMA_RANGE)), 1)
        q_opt = mu + sigma * z
        if q_opt > 0.0:
            break

    distractors: Tuple[str, ...] = ()
    percentiles = None
    if level == DISTRACTOR_LEVEL:
        distractors = (_distractor(rng),)
    elif level == CENSORED_LEVEL:
        percentiles = demand_percentiles(mu, sigma)
    return NewsvendorScenario(scenario_id, level, price, cost, salvage, mu, sigma, cr, q_opt,
                              split, distractors, percentiles, stage)


def undecorated(sc: NewsvendorScenario) -> NewsvendorScenario:
    """The same scenario without distractors or censoring."""
    return replace(sc, distractors=(), percentiles=None)


def render_prompt(sc: NewsvendorScenario) -> str:
    """Deterministic prompt text; never states the CR or the optimal order."""
    lines = [
        "You manage inventory for a single selling season. Decide how many units to order "
        "before demand is known. Unsold units are sold off at the salvage price.",
        "",
        f"Price: ${sc.price:.2f}, Cost: ${sc.cost:.2f}, Salvage: ${sc.salvage:.2f}",
    ]
    lines.extend(sc.distractors)
    if sc.censored:
        p25, p50, p75 = sc.percentiles
        lines.append(f"Demand percentiles: 25th: {p25:.2f}, 50th (median): {p50:.2f}, "
                     f"75th: {p75:.2f}")
    else:
        lines.append(f"Mean demand: {sc.mu:.1f}, Std: {sc.sigma:.1f}")
    lines += [
        "Demand is normally distributed.",
        "",
        'Answer with the order quantity as JSON, for example {"q": 120}.',
    ]
    return "\n".join(lines)


def dump_scenario(sc: NewsvendorScenario) -> str:
    return dumps_canonical(sc.to_dict())
