"""
Error injection for the nine error types.

Every injector takes a feasible model and returns a verified-infeasible
copy together with the ground truth needed to grade a repair. Injectors
try a ranked list of candidates and raise InjectionFailure when none of
them produces an infeasibility the IIS attributes to the corrupted row.

Types G-I first replace every constraint name with an opaque id of the
form c_<6 hex>_<ub|lb|eq> so that names carry no hint about which row was
corrupted.
"""

import logging
import math
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from ..exceptions import InjectionFailure, SolverFailure
from ..lp import (BoundSide, Constraint, LpModel, ModelEdit, Sense, apply_edit, apply_edits,
                  bound_row_name)
from ..solver import (DEFAULT_CONFIG, SOLVER_NAME, IisReport, SolveResult, SolveStatus,
                      SolverConfig, compute_iis, implied_range, solve)
from .error_types import ErrorType
from .graph import coupled_variables, interaction_graph, variables_by_degree
from .instance import GroundTruth, SabotageConfig

logger = logging.getLogger(__name__)

TIER4_EPSILON = 1.0
ALPHA_RANGE = (1.2, 1.5)
RHS_SHRINK_FACTORS = (0.3, 0.6, 1.0)
CAPACITY_FRACTIONS = (0.5, 0.25, 0.0)
FLOW_MAGNITUDES = (0.25, 0.5, 1.0, 2.0, 4.0)
COUPLED_GROUP_SIZE = 4

_SUFFIX = {Sense.LE: "ub", Sense.GE: "lb", Sense.EQ: "eq"}


@dataclass(frozen=True)
class InjectionResult:
    """
    original is the model the ground truth refers to; for anonymized types
    it is the renamed copy of the input.
    """
    original: LpModel
    sabotaged: LpModel
    ground_truth: GroundTruth
    root_cause: Optional[str] = None
    cascade: Optional[GroundTruth] = None
    details: Mapping[str, Any] = field(default_factory=dict)


# --- naming ------------------------------------------------------------------

def opaque_name(rng: np.random.Generator, sense: Sense, taken: Set[str]) -> str:
    while True:
        name = f"c_{uuid.UUID(bytes=rng.bytes(16)).hex[:6]}_{_SUFFIX[sense]}"
        if name not in taken:
            taken.add(name)
            return name


def anonymize_constraints(m: LpModel, rng: np.random.Generator) -> Tuple[LpModel, Dict[str, str]]:
    """Rename every constraint to an opaque id; returns the model and old->new map."""
    taken: Set[str] = set()
    mapping = {c.name: opaque_name(rng, c.sense, taken) for c in m.constraints}
    return m.rename_constraints(mapping), mapping


# --- shared checks -----------------------------------------------------------

def _infeasible_iis(m: LpModel, config: SolverConfig) -> Optional[IisReport]:
    """IIS of m when m is INFEASIBLE, else None."""
    status = solve(m, config).status
    if status is not SolveStatus.INFEASIBLE:
        return None
    return compute_iis(m, config, status=status)


def _calibrated(cfg: SabotageConfig, error_type: ErrorType, iis: IisReport) -> bool:
    """IIS size inside the type's target range; anything goes with calibration off."""
    return not cfg.calibrate or error_type.info.in_range(iis.size)


def _restores(m: LpModel, edits: Sequence[ModelEdit], config: SolverConfig) -> bool:
    return solve(apply_edits(m, edits), config).status is SolveStatus.OPTIMAL


def _inequalities(m: LpModel) -> List[Constraint]:
    return [c for c in m.constraints if c.sense is not Sense.EQ]


def _by_slack(constraints: Sequence[Constraint], base: SolveResult,
              descending: bool = False) -> List[Constraint]:
    order = {c.name: i for i, c in enumerate(constraints)}
    sign = -1.0 if descending else 1.0
    return sorted(constraints, key=lambda c: (sign * abs(base.slacks[c.name]), order[c.name]))


def _truth(key: Sequence[str], fix: Sequence[ModelEdit], iis: IisReport,
           base: SolveResult, alternatives=()) -> GroundTruth:
    return GroundTruth(tuple(key), tuple(fix), iis, base.objective, tuple(alternatives))


# --- Type A: direction flip ----------------------------------------------------

def inject_direction_flip(m, base, cfg, rng, config) -> InjectionResult:
    tried = 0
    for con in _by_slack(_inequalities(m), base)[:cfg.num_candidates]:
        tried += 1
        sabotaged = apply_edit(m, ModelEdit.flip(con.name))
        iis = _infeasible_iis(sabotaged, config)
        if iis is not None and con.name in iis and _calibrated(cfg, ErrorType.A, iis):
            return InjectionResult(m, sabotaged,
                                   _truth([con.name], [ModelEdit.flip(con.name)], iis, base))
    raise InjectionFailure("A", "no flipped candidate lands in the IIS", tried)


# --- Type B: RHS miscalculation -----------------------------------------------

def inject_rhs_error(m, base, cfg, rng, config) -> InjectionResult:
    candidates = [c for c in _inequalities(m) if c.rhs != 0.0]
    tried = 0
    for con in _by_slack(candidates, base)[:cfg.num_candidates]:
        slack = max(0.0, base.slacks[con.name])
        for factor in RHS_SHRINK_FACTORS:
            tried += 1
            shift = slack + factor * abs(con.rhs)
            new_rhs = con.rhs - shift if con.sense is Sense.LE else con.rhs + shift
            sabotaged = apply_edit(m, ModelEdit.set_rhs(con.name, new_rhs))
            iis = _infeasible_iis(sabotaged, config)
            if iis is not None and con.name in iis and _calibrated(cfg, ErrorType.B, iis):
                fix = ModelEdit.set_rhs(con.name, con.rhs)
                return InjectionResult(m, sabotaged, _truth([con.name], [fix], iis, base))
    raise InjectionFailure("B", "no RHS shift produced an attributable conflict", tried)


# --- Type C: upper bound conflict, four tiers ------------------------------------

def _tier_rewrites(m: LpModel, base: SolveResult):
    """Yield (tier, constraint, new terms) in tier order for tiers 1-3."""
    order = {c.name: i for i, c in enumerate(m.constraints)}
    ge = [c for c in m.constraints if c.sense is Sense.GE]
    ge.sort(key=lambda c: (-abs(base.duals.get(c.name, 0.0)), order[c.name]))
    for con in ge:
        kept = {v: a for v, a in con.terms.items() if a <= 0.0}
        if kept and len(kept) < len(con.terms):
            yield 1, con, kept
    for con in (c for c in m.constraints if c.sense is Sense.LE):
        if any(a > 0.0 for a in con.terms.values()):
            yield 2, con, {v: (-a if a > 0.0 else a) for v, a in con.terms.items()}
    for con in _inequalities(m):
        yield 3, con, {v: 10.0 * a for v, a in con.terms.items()}


def inject_upper_bound_conflict(m, base, cfg, rng, config) -> InjectionResult:
    tried = 0
    for tier, con, terms in _tier_rewrites(m, base):
        tried += 1
        sabotaged = apply_edit(m, ModelEdit.rewrite(con.name, terms, con.sense, con.rhs))
        iis = _infeasible_iis(sabotaged, config)
        if iis is not None and con.name in iis and _calibrated(cfg, ErrorType.C, iis):
            fix = ModelEdit.rewrite(con.name, con.terms, con.sense, con.rhs)
            return InjectionResult(m, sabotaged, _truth([con.name], [fix], iis, base),
                                   details={"tier": tier, "candidates": tried})

    # tier 4: pin the widest-ranging variable at its optimum, then demand more
    widest, width = None, -1.0
    for var in m.variables:
        lo, hi = implied_range(m, {var.name: 1.0}, config)
        span = hi - lo
        if span > width:
            widest, width = var, span
    x_star = base.primal[widest.name]
    floor_name = f"c_{widest.name}_floor"
    suffix = 1
    while m.has_constraint(floor_name):
        floor_name = f"c_{widest.name}_floor{suffix}"
        suffix += 1
    floor = Constraint(floor_name, {widest.name: 1.0}, Sense.GE, x_star + TIER4_EPSILON)
    sabotaged = apply_edits(m, [ModelEdit.set_bound(widest.name, BoundSide.UPPER, x_star),
                                ModelEdit.add(floor)])
    iis = _infeasible_iis(sabotaged, config)
    if iis is None or floor_name not in iis or not _calibrated(cfg, ErrorType.C, iis):
        raise InjectionFailure("C", "tier-4 fallback did not verify", tried + 1)
    return InjectionResult(m, sabotaged,
                           _truth([floor_name], [ModelEdit.drop(floor_name)], iis, base),
                           details={"tier": 4, "candidates": tried + 1})


# --- Type D: lower bound conflict --------------------------------------------------

def inject_lower_bound_conflict(m, base, cfg, rng, config) -> InjectionResult:
    tried = 0
    for name in variables_by_degree(m)[:cfg.num_candidates]:
        var = m.variable(name)
        _, hi = implied_range(m, {name: 1.0}, config)
        if not math.isfinite(hi):
            continue
        tried += 1
        new_lower = hi + max(1.0, 0.25 * abs(hi))
        if new_lower > var.upper:
            if var.upper - hi <= config.feasibility_tol:
                continue
            new_lower = 0.5 * (hi + var.upper)
        row = bound_row_name(name, BoundSide.LOWER)
        sabotaged = apply_edit(m, ModelEdit.set_bound(name, BoundSide.LOWER, new_lower))
        iis = _infeasible_iis(sabotaged, config)
        if iis is not None and row in iis and _calibrated(cfg, ErrorType.D, iis):
            fix = ModelEdit.set_bound(name, BoundSide.LOWER, var.lower)
            return InjectionResult(m, sabotaged, _truth([row], [fix], iis, base))
    raise InjectionFailure("D", "no variable with a finite implied maximum conflicts", tried)


# --- Type E: resource over-allocation ----------------------------------------------

def inject_over_allocation(m, base, cfg, rng, config) -> InjectionResult:
    alpha = cfg.alpha if cfg.alpha is not None else float(rng.uniform(*ALPHA_RANGE))
    order = {c.name: i for i, c in enumerate(m.constraints)}
    demands = [c for c in m.constraints if c.sense is Sense.GE and c.rhs > 0.0]
    demands.sort(key=lambda c: (-c.rhs, order[c.name]))
    tried = 0
    for con in demands[:cfg.num_candidates]:
        tried += 1
        new_rhs = con.rhs * alpha
        sabotaged = apply_edit(m, ModelEdit.set_rhs(con.name, new_rhs))
        iis = _infeasible_iis(sabotaged, config)
        if iis is not None and con.name in iis and _calibrated(cfg, ErrorType.E, iis):
            fix = ModelEdit.relax(con.name, con.rhs - new_rhs)
            return InjectionResult(m, sabotaged, _truth([con.name], [fix], iis, base),
                                   details={"alpha": alpha})
    raise InjectionFailure("E", f"scaling requirements by {alpha:.3f} stayed feasible", tried)


# --- Type F: capacity violation with a hidden cause -----------------------------------

def _symptom_pairs(m: LpModel, base: SolveResult) -> List[Tuple[Constraint, str]]:
    """(requirement row, variable feeding it) ordered by the variable's contribution."""
    g = interaction_graph(m)
    pairs = []
    for con in m.constraints:
        if con.sense is Sense.LE:
            continue
        for _, (_, var) in g.edges(("con", con.name)):
            coef = con.terms[var]
            if coef > 0.0:
                pairs.append((con, var, coef * base.primal[var]))
    order = {c.name: i for i, c in enumerate(m.constraints)}
    pairs.sort(key=lambda p: (-p[2], order[p[0].name], p[1]))
    return [(con, var) for con, var, _ in pairs]


def inject_capacity_violation(m, base, cfg, rng, config) -> InjectionResult:
    tried = 0
    for con, name in _symptom_pairs(m, base)[:cfg.num_candidates]:
        var = m.variable(name)
        x_star = base.primal[name]
        if not math.isfinite(var.lower) or x_star - var.lower <= config.feasibility_tol:
            continue
        for fraction in CAPACITY_FRACTIONS:
            tried += 1
            cap = var.lower + fraction * (x_star - var.lower)
            sabotaged = apply_edit(m, ModelEdit.set_bound(name, BoundSide.UPPER, cap))
            iis = _infeasible_iis(sabotaged, config)
            if iis is not None and con.name in iis and _calibrated(cfg, ErrorType.F, iis):
                fix = ModelEdit.set_bound(name, BoundSide.UPPER, var.upper)
                return InjectionResult(m, sabotaged, _truth([con.name], [fix], iis, base),
                                       root_cause=bound_row_name(name, BoundSide.UPPER))
    raise InjectionFailure("F", "no capacity cut made a requirement infeasible", tried)


# --- Type G: flow imbalance with a masked second conflict ----------------------------

def _masking_row(m: LpModel, rng: np.random.Generator, config: SolverConfig,
                 limit: int) -> Optional[Constraint]:
    """A row v >= max(v) + gap that m alone cannot satisfy."""
    taken = set(m.constraint_names)
    for name in variables_by_degree(m)[:limit]:
        _, hi = implied_range(m, {name: 1.0}, config)
        if math.isfinite(hi):
            gap = max(1.0, 0.1 * abs(hi))
            return Constraint(opaque_name(rng, Sense.GE, taken), {name: 1.0}, Sense.GE, hi + gap)
    return None


def inject_flow_imbalance(m, base, cfg, rng, config) -> InjectionResult:
    secondary = _masking_row(m, rng, config, cfg.num_candidates)
    if secondary is None:
        raise InjectionFailure("G", "no variable with a finite implied maximum")
    scale = max(1.0, max(abs(c.rhs) for c in m.constraints))
    balances = [c for c in m.constraints if c.sense is Sense.EQ]
    tried = 0
    for con in balances[:cfg.num_candidates]:
        for mag in FLOW_MAGNITUDES:
            for sign in (1.0, -1.0):
                tried += 1
                primary_edit = ModelEdit.set_rhs(con.name, con.rhs + sign * mag * scale)
                sabotaged = apply_edits(m, [primary_edit, ModelEdit.add(secondary, position=0)])
                iis = _infeasible_iis(sabotaged, config)
                if (iis is None or con.name not in iis or secondary.name in iis
                        or not _calibrated(cfg, ErrorType.G, iis)):
                    continue
                primary_fix = ModelEdit.set_rhs(con.name, con.rhs)
                exposed = _infeasible_iis(apply_edit(sabotaged, primary_fix), config)
                if exposed is None or secondary.name not in exposed:
                    continue
                cascade_fix = ModelEdit.drop(secondary.name)
                if not _restores(sabotaged, [primary_fix, cascade_fix], config):
                    continue
                return InjectionResult(
                    m, sabotaged,
                    _truth([con.name], [primary_fix], iis, base),
                    cascade=_truth([secondary.name], [cascade_fix], exposed, base),
                    details={"imbalance": sign * mag * scale},
                )
    raise InjectionFailure("G", "no balance shift produced a clean cascade", tried)


# --- Type H: multi-constraint conflict ------------------------------------------------

def _requirement_groups(m: LpModel, limit: int) -> List[Tuple[str, ...]]:
    """Single variables first, then coupled groups of growing size, without repeats."""
    seeds = variables_by_degree(m)
    groups, seen = [], set()
    for size in range(1, COUPLED_GROUP_SIZE + 1):
        for seed in seeds:
            group = tuple(coupled_variables(m, seed, size))
            if len(group) < size or frozenset(group) in seen:
                continue
            seen.add(frozenset(group))
            groups.append(group)
    return groups[:limit]


def inject_multi_constraint(m, base, cfg, rng, config) -> InjectionResult:
    """
    Add a requirement on a variable or coupled group above its implied
    maximum. The maximum is set jointly by the rows the group depends on,
    so the IIS spans all of them.
    """
    taken = set(m.constraint_names)
    tried = 0
    for group in _requirement_groups(m, cfg.num_candidates * COUPLED_GROUP_SIZE):
        expr = {v: 1.0 for v in group}
        _, hi = implied_range(m, expr, config)
        if not math.isfinite(hi):
            continue
        tried += 1
        row = Constraint(opaque_name(rng, Sense.GE, taken), expr, Sense.GE,
                         hi + max(1.0, 0.1 * abs(hi)))
        sabotaged = apply_edit(m, ModelEdit.add(row))
        iis = _infeasible_iis(sabotaged, config)
        if iis is not None and row.name in iis and _calibrated(cfg, ErrorType.H, iis):
            return InjectionResult(m, sabotaged,
                                   _truth([row.name], [ModelEdit.drop(row.name)], iis, base),
                                   details={"group": list(group)})
    raise InjectionFailure("H", "no requirement produced a conflict of the target size", tried)


# --- Type I: composite (flip plus a bound it masks) ------------------------------------

def _maxima(m: LpModel, config: SolverConfig) -> Dict[str, float]:
    return {v.name: implied_range(m, {v.name: 1.0}, config)[1] for v in m.variables}


def inject_composite(m, base, cfg, rng, config) -> InjectionResult:
    """
    Flip a requirement row and raise a lower bound into the gap the flip
    opens: above the variable's maximum under the flipped row, below its
    maximum in the original. Either edit alone leaves the model feasible,
    so undoing one of them restores feasibility, but only undoing both
    restores the original optimum.
    """
    tol = 10.0 * config.feasibility_tol
    maxima = _maxima(m, config)
    tried = 0
    for con in _by_slack([c for c in m.constraints if c.sense is Sense.GE], base):
        flip = ModelEdit.flip(con.name)
        flipped = apply_edit(m, flip)
        if solve(flipped, config).status is not SolveStatus.OPTIMAL:
            continue
        flipped_maxima = _maxima(flipped, config)
        for var in m.variables:
            hi, hi_flipped = maxima[var.name], flipped_maxima[var.name]
            if not math.isfinite(hi) or hi - hi_flipped <= tol:
                continue
            new_lower = 0.5 * (hi + hi_flipped)
            if new_lower <= var.lower:
                continue
            tried += 1
            row = bound_row_name(var.name, BoundSide.LOWER)
            sabotaged = apply_edits(m, [flip, ModelEdit.set_bound(var.name, BoundSide.LOWER,
                                                                  new_lower)])
            iis = _infeasible_iis(sabotaged, config)
            if (iis is None or con.name not in iis or row not in iis
                    or not _calibrated(cfg, ErrorType.I, iis)):
                continue
            undo = [flip, ModelEdit.set_bound(var.name, BoundSide.LOWER, var.lower)]
            if not _restores(sabotaged, undo, config):
                continue
            singles = [ModelEdit.drop(con.name)] + undo
            restorers = tuple((e,) for e in singles if _restores(sabotaged, [e], config))
            if len(restorers) < 2:
                continue
            return InjectionResult(m, sabotaged,
                                   _truth([con.name], undo, iis, base, alternatives=restorers),
                                   details={"raised_bound": row})
    raise InjectionFailure("I", "no flip opened a bound gap of the target size", tried)



_INJECTORS: Dict[ErrorType, Callable[..., InjectionResult]] = {
    ErrorType.A: inject_direction_flip,
    ErrorType.B: inject_rhs_error,
    ErrorType.C: inject_upper_bound_conflict,
    ErrorType.D: inject_lower_bound_conflict,
    ErrorType.E: inject_over_allocation,
    ErrorType.F: inject_capacity_violation,
    ErrorType.G: inject_flow_imbalance,
    ErrorType.H: inject_multi_constraint,
    ErrorType.I: inject_composite,
}


def inject(m: LpModel, error_type: ErrorType, cfg: SabotageConfig,
           rng: np.random.Generator, config: SolverConfig = DEFAULT_CONFIG) -> InjectionResult:
    """
    Corrupt a feasible model with one error type.

    Raises:
        InjectionFailure: no candidate produced a verified sabotage
        SolverFailure: m is not OPTIMAL to begin with
    """
    error_type = ErrorType(error_type)
    if error_type.anonymized:
        m, _ = anonymize_constraints(m, rng)
    base = solve(m, config)
    if base.status is not SolveStatus.OPTIMAL:
        raise SolverFailure(base.status.value, SolveStatus.OPTIMAL.value, SOLVER_NAME,
                            phase="inject", model=m)
    try:
        result = _INJECTORS[error_type](m, base, cfg, rng, config)
    except SolverFailure as exc:
        raise InjectionFailure(error_type.value, f"solver trouble: {exc.base_message}")
    logger.debug("Type %s injected: key=%s iis=%d", error_type.value,
                 result.ground_truth.key_constraints, result.ground_truth.iis_gt.size)
    return result
