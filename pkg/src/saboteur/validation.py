"""
Four-fold validation of benchmark instances.

    1. the original model solves to OPTIMAL
    2. the sabotaged model is INFEASIBLE
    3. its IIS is non-empty and holds the key constraints
    4. applying the ground-truth fix (plus any cascade fix) restores OPTIMAL

Failures are reported, never raised.
"""

import logging
import math
from typing import Iterable, List, Optional

from ..exceptions import OrGymError
from ..lp import apply_edits
from ..solver import DEFAULT_CONFIG, SolveStatus, SolverConfig, compute_iis, solve
from .instance import BenchmarkInstance

logger = logging.getLogger(__name__)


class ValidationReport:
    """Result of validating one instance; failed_phase is None on success."""

    def __init__(self, passed: bool, failed_phase: Optional[int] = None, message: str = "",
                 details: List[str] = None):
        self.passed = passed
        self.failed_phase = failed_phase
        self.message = message
        self.details = details if details is not None else []

    def to_dict(self):
        return {
            "pass": self.passed,
            "failed_phase": self.failed_phase,
            "message": self.message,
            "details": list(self.details),
        }

    def __str__(self) -> str:
        status = "✓ PASSED" if self.passed else f"✗ FAILED (phase {self.failed_phase})"
        result = f"{status}: {self.message}"
        if self.details:
            result += "\n  Details:\n    " + "\n    ".join(self.details)
        return result


class FourFoldValidator:
    """
    Runs the four phases in order and stops at the first failure.
    """

    def __init__(self, config: SolverConfig = DEFAULT_CONFIG):
        self.config = config

    def check(self, inst: BenchmarkInstance) -> ValidationReport:
        original = solve(inst.original, self.config)
        if original.status is not SolveStatus.OPTIMAL:
            return ValidationReport(False, 1, f"{inst.id}: original is {original.status.value}")

        sabotaged = solve(inst.sabotaged, self.config)
        if sabotaged.status is not SolveStatus.INFEASIBLE:
            return ValidationReport(False, 2, f"{inst.id}: sabotaged is {sabotaged.status.value}")

        try:
            iis = compute_iis(inst.sabotaged, self.config, status=sabotaged.status)
        except OrGymError as exc:
            return ValidationReport(False, 3, f"{inst.id}: IIS failed", [str(exc)])
        missing = [k for k in inst.ground_truth.key_constraints if k not in iis]
        if iis.size == 0 or missing:
            return ValidationReport(False, 3, f"{inst.id}: key constraints outside the IIS",
                                    [f"IIS: {', '.join(iis.members)}",
                                     f"missing: {', '.join(missing)}"])
        if iis.members != inst.ground_truth.iis_gt.members:
            logger.warning("%s: recorded IIS differs from recomputed one", inst.id)

        try:
            repaired = solve(apply_edits(inst.sabotaged, inst.all_fixes()), self.config)
        except OrGymError as exc:
            return ValidationReport(False, 4, f"{inst.id}: fix does not apply", [str(exc)])
        if repaired.status is not SolveStatus.OPTIMAL:
            return ValidationReport(False, 4, f"{inst.id}: fix leaves {repaired.status.value}")

        return ValidationReport(True, None, f"{inst.id}: all four checks passed",
                                [f"IIS size {iis.size}", f"objective {repaired.objective:g}"])


class CrossCheckValidator:
    """
    Re-solves the original and sabotaged models with CBC through PuLP and
    compares statuses (and the original objective) with ours.
    """

    def __init__(self, objective_tol: float = 1e-6):
        self.objective_tol = objective_tol

    def check(self, inst: BenchmarkInstance) -> ValidationReport:
        from ..solver.pulp_bridge import solve_with_pulp

        status, objective = solve_with_pulp(inst.original)
        if status is not SolveStatus.OPTIMAL:
            return ValidationReport(False, 1, f"{inst.id}: CBC reports original {status.value}")
        if not math.isclose(objective, inst.ground_truth.original_objective,
                            rel_tol=self.objective_tol, abs_tol=self.objective_tol):
            return ValidationReport(False, 1, f"{inst.id}: CBC objective disagrees",
                                    [f"CBC {objective:g} vs recorded "
                                     f"{inst.ground_truth.original_objective:g}"])
        status, _ = solve_with_pulp(inst.sabotaged)
        if status is not SolveStatus.INFEASIBLE:
            return ValidationReport(False, 2, f"{inst.id}: CBC reports sabotaged {status.value}")
        return ValidationReport(True, None, f"{inst.id}: CBC agrees")


def validate(inst: BenchmarkInstance, config: SolverConfig = DEFAULT_CONFIG) -> ValidationReport:
    return FourFoldValidator(config).check(inst)


def validate_all(instances: Iterable[BenchmarkInstance],
                 config: SolverConfig = DEFAULT_CONFIG) -> List[ValidationReport]:
    validator = FourFoldValidator(config)
    return [validator.check(inst) for inst in instances]
