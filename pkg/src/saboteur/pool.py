"""
Seed LP pool: small feasible production, transportation, hub-network and
multi-period inventory models with a templated natural-language description.

Capacities exceed requirements by a thin margin (10% of the largest
requirement) so that moderate corruptions turn them infeasible.
"""

import json
import logging
from typing import Callable, Dict, List, Sequence

import numpy as np

from ..exceptions import SchemaError, SolverFailure
from ..lp import (SCHEMA_VERSION, Constraint, LpModel, ObjectiveSense, Sense, Variable,
                  dumps_canonical, model_from_dict, model_to_dict)
from ..solver import SOLVER_NAME, SolveStatus, SolverConfig, DEFAULT_CONFIG, solve

logger = logging.getLogger(__name__)


def _margin(requirements: Sequence[int]) -> int:
    return max(1, int(round(0.1 * max(requirements))))


def _split(total: int, parts: int, rng: np.random.Generator) -> List[int]:
    """Split an integer total into `parts` positive integers at random."""
    weights = rng.uniform(0.5, 1.5, size=parts)
    shares = [max(1, int(total * w / weights.sum())) for w in weights]
    shares[-1] = total - sum(shares[:-1])
    if shares[-1] < 1:
        shares = [total // parts] * parts
        shares[-1] += total - sum(shares)
    return shares


def production_model(rng: np.random.Generator) -> LpModel:
    n = int(rng.integers(3, 6))
    mins = [int(rng.integers(10, 61)) for _ in range(n)]
    costs = [int(rng.integers(1, 11)) for _ in range(n)]
    cap = sum(mins) + _margin(mins)

    variables = [Variable(f"x{i}", 0.0, float(cap), float(costs[i])) for i in range(n)]
    variables.append(Variable("total", 0.0, float("inf"), 0.0))
    constraints = [
        Constraint("c_total", {"total": 1.0}, Sense.LE, cap),
        Constraint("balance", {"total": 1.0, **{f"x{i}": -1.0 for i in range(n)}}, Sense.EQ, 0.0),
    ]
    constraints += [Constraint(f"min_{i}", {f"x{i}": 1.0}, Sense.GE, mins[i]) for i in range(n)]
    constraints.append(Constraint("group_01", {"x0": 1.0, "x1": 1.0}, Sense.GE,
                                  (mins[0] + mins[1]) // 2))
    description = (
        f"A plant makes {n} products. Producing one unit of product i costs "
        f"{', '.join(f'${c}' for c in costs)} respectively. Total output may not exceed "
        f"{cap} units, each product has a minimum production level "
        f"({', '.join(str(m) for m in mins)} units), and products 0 and 1 together must reach "
        f"{(mins[0] + mins[1]) // 2} units. Choose production quantities that minimize total cost."
    )
    return LpModel(ObjectiveSense.MIN, tuple(variables), tuple(constraints), description)


def transport_model(rng: np.random.Generator) -> LpModel:
    m = int(rng.integers(2, 4))
    n = int(rng.integers(2, 5))
    demands = [int(rng.integers(10, 61)) for _ in range(n)]
    supplies = _split(sum(demands) + _margin(demands), m, rng)

    variables = [Variable(f"f_{i}_{j}", 0.0, float("inf"), float(rng.integers(1, 11)))
                 for i in range(m) for j in range(n)]
    variables.append(Variable("shipped", 0.0, float("inf"), 0.0))
    constraints = [Constraint(f"s{i}_cap", {f"f_{i}_{j}": 1.0 for j in range(n)}, Sense.LE, supplies[i])
                   for i in range(m)]
    constraints += [Constraint(f"d{j}_min", {f"f_{i}_{j}": 1.0 for i in range(m)}, Sense.GE, demands[j])
                    for j in range(n)]
    all_flows = {f"f_{i}_{j}": 1.0 for i in range(m) for j in range(n)}
    constraints.append(Constraint("ship_total", {**all_flows, "shipped": -1.0}, Sense.EQ, 0.0))
    constraints.append(Constraint("min_shipment", {"shipped": 1.0}, Sense.GE, sum(demands) // 2))
    description = (
        f"A distributor ships goods from {m} warehouses with capacities "
        f"{', '.join(str(s) for s in supplies)} to {n} stores with demands "
        f"{', '.join(str(d) for d in demands)}. Each route has a per-unit shipping cost and at "
        f"least {sum(demands) // 2} units must ship overall. Minimize total shipping cost."
    )
    return LpModel(ObjectiveSense.MIN, tuple(variables), tuple(constraints), description)


def network_model(rng: np.random.Generator) -> LpModel:
    sources, hubs = 2, 2
    sinks = int(rng.integers(2, 4))
    demands = [int(rng.integers(10, 61)) for _ in range(sinks)]
    supplies = _split(sum(demands) + _margin(demands), sources, rng)

    inbound = [f"a_{s}_{h}" for s in range(sources) for h in range(hubs)]
    outbound = [f"b_{h}_{t}" for h in range(hubs) for t in range(sinks)]
    variables = [Variable(name, 0.0, float("inf"), float(rng.integers(1, 11)))
                 for name in inbound + outbound]
    constraints = [Constraint(f"supply_{s}", {f"a_{s}_{h}": 1.0 for h in range(hubs)}, Sense.LE,
                              supplies[s]) for s in range(sources)]
    for h in range(hubs):
        terms = {f"a_{s}_{h}": 1.0 for s in range(sources)}
        terms.update({f"b_{h}_{t}": -1.0 for t in range(sinks)})
        constraints.append(Constraint(f"hub_{h}_balance", terms, Sense.EQ, 0.0))
    constraints += [Constraint(f"demand_{t}", {f"b_{h}_{t}": 1.0 for h in range(hubs)}, Sense.GE,
                               demands[t]) for t in range(sinks)]
    constraints.append(Constraint("throughput", {name: 1.0 for name in inbound}, Sense.GE,
                                  sum(demands) // 2))
    description = (
        f"Two suppliers with capacities {supplies[0]} and {supplies[1]} feed {sinks} customers "
        f"(demands {', '.join(str(d) for d in demands)}) through two cross-docking hubs that "
        f"hold no stock. Inbound throughput must be at least {sum(demands) // 2} units. "
        f"Minimize total transport cost."
    )
    return LpModel(ObjectiveSense.MIN, tuple(variables), tuple(constraints), description)


def inventory_model(rng: np.random.Generator) -> LpModel:
    """
    Multi-period production with carried stock. Each period has a capacity
    and a minimum run; stock links consecutive periods, so a shortage in
    period t involves every capacity and balance row up to t.
    """
    periods = int(rng.integers(6, 9))
    demands = [int(rng.integers(10, 61)) for _ in range(periods)]
    spare = [max(2, int(round(rng.uniform(0.1, 0.3) * d))) for d in demands]
    caps = [d + e for d, e in zip(demands, spare)]
    runs = [c - max(1, e // 2) for c, e in zip(caps, spare)]
    costs = [int(rng.integers(1, 11)) for _ in range(periods)]
    holding = int(rng.integers(1, 4))

    variables, constraints = [], []
    for t in range(periods):
        variables.append(Variable(f"make_{t}", 0.0, float("inf"), float(costs[t])))
        variables.append(Variable(f"stock_{t}", 0.0, float("inf"), float(holding)))
        terms = {f"make_{t}": 1.0, f"stock_{t}": -1.0}
        if t > 0:
            terms[f"stock_{t - 1}"] = 1.0
        constraints += [
            Constraint(f"cap_{t}", {f"make_{t}": 1.0}, Sense.LE, caps[t]),
            Constraint(f"min_run_{t}", {f"make_{t}": 1.0}, Sense.GE, runs[t]),
            Constraint(f"flow_{t}", terms, Sense.EQ, demands[t]),
        ]
    description = (
        f"A factory plans {periods} periods with demands {', '.join(str(d) for d in demands)}. "
        f"Period capacities are {', '.join(str(c) for c in caps)} units and every period must run "
        f"at least {', '.join(str(r) for r in runs)} units. Unsold units carry over at "
        f"${holding} per unit and period; production costs "
        f"{', '.join(f'${c}' for c in costs)} per unit. Minimize total cost."
    )
    return LpModel(ObjectiveSense.MIN, tuple(variables), tuple(constraints), description)


FAMILIES: Dict[str, Callable[[np.random.Generator], LpModel]] = {
    "production": production_model,
    "transport": transport_model,
    "network": network_model,
    "inventory": inventory_model,
}


def generate_pool(size: int, rng: np.random.Generator,
                  families: Sequence[str] = tuple(FAMILIES),
                  config: SolverConfig = DEFAULT_CONFIG) -> List[LpModel]:
    """
    Build `size` seed models, cycling through the requested families.

    Raises:
        SolverFailure: a generated model does not solve to OPTIMAL
    """
    pool = []
    for i in range(size):
        family = families[i % len(families)]
        model = FAMILIES[family](rng)
        result = solve(model, config)
        if result.status is not SolveStatus.OPTIMAL:
            raise SolverFailure(result.status.value, SolveStatus.OPTIMAL.value, SOLVER_NAME,
                                phase=f"seed pool ({family})", model=model)
        pool.append(model)
    logger.info("generated seed pool of %d models", len(pool))
    return pool


def write_pool(path: str, pool: Sequence[LpModel]):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for model in pool:
            fh.write(dumps_canonical({"schema_version": SCHEMA_VERSION,
                                      "model": model_to_dict(model)}) + "\n")


def read_pool(path: str) -> List[LpModel]:
    """
    Read a pool file: one {"schema_version", "model"} object per line.

    Raises:
        SchemaError: malformed line or unsupported schema_version
    """
    pool = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError("Invalid JSON line", path=path, line=lineno, reason=str(exc))
            if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
                raise SchemaError("Unsupported pool line", path=path, line=lineno)
            pool.append(model_from_dict(data.get("model")))
    return pool
