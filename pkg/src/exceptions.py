"""
Exceptions for the LP debugging toolkit.

Every error raised by the package derives from OrGymError, which carries
structured context so that the CLI can emit a machine-readable error line
and reports can embed the failure verbatim.
"""

from typing import Any, Dict, Iterable, List, Optional


class OrGymError(RuntimeError):
    """
    Base class for all toolkit errors.

    Subclasses pass their context as keyword arguments; those become
    attributes, appear in the message and are returned by to_dict().
    """

    def __init__(self, message: str, **context: Any):
        self.context = context
        for key, value in context.items():
            setattr(self, key, value)
        self.base_message = message
        super().__init__(self._build_message())

    def _build_message(self) -> str:
        parts = [self.base_message]
        for key, value in self.context.items():
            if value is None:
                continue
            parts.append(f"{key}: {value}")
        return " | ".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to a JSON-ready dictionary."""
        result: Dict[str, Any] = {
            "error": type(self).__name__,
            "message": self.base_message,
        }
        for key, value in self.context.items():
            result[key] = _jsonable(value)
        return result


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    return str(value)


# --- lp-core ---------------------------------------------------------------

class SchemaError(OrGymError):
    """Malformed JSON or a missing/mistyped field."""


class InvariantError(OrGymError):
    """A model, bound or constraint invariant does not hold."""


class UnknownTarget(OrGymError):
    """An edit or action names a constraint or variable that does not exist."""

    def __init__(self, target: str, kind: Optional[str] = None):
        super().__init__(f"Unknown target '{target}'", target=target, kind=kind)


class FlipOnEquality(OrGymError):
    """FLIP applied to an equality constraint."""

    def __init__(self, target: str):
        super().__init__(f"Cannot flip equality constraint '{target}'", target=target)


# --- solver ------------------------------------------------------------------

class UnknownVariable(OrGymError):
    """A primal point does not cover a variable referenced by the model."""

    def __init__(self, variable: str):
        super().__init__(f"No value for variable '{variable}'", variable=variable)


class NotInfeasible(OrGymError):
    """IIS requested for a model that is not infeasible."""

    def __init__(self, status: str):
        super().__init__("IIS requested for a model that is not INFEASIBLE", status=status)


class SolverFailure(OrGymError):
    """
    A solve that had to reach a given status did not.

    Raised by callers that need a specific status (e.g. the saboteur
    requires an OPTIMAL seed model). The solve itself never raises.

    Attributes:
        status: Status actually returned
        expected: Status the caller needed
        solver_name: Backend that produced the status
        phase: Optional pipeline phase where it happened
        model: The LpModel that was solved (for format_report)
    """

    def __init__(self,
                 status: str,
                 expected: str,
                 solver_name: str = "dense-simplex",
                 phase: Optional[str] = None,
                 model: Any = None):
        self.model = model
        super().__init__(
            "Solve did not reach the required status",
            status=status,
            expected=expected,
            solver_name=solver_name,
            phase=phase,
        )

    def format_report(self) -> str:
        """
        Format a detailed human-readable report.

        Returns:
            Multi-line string with the status context and the full model
        """
        lines = [
            "=" * 80,
            "SOLVER FAILURE",
            "=" * 80,
            "",
            f"Solver:       {self.solver_name}",
            f"Status:       {self.status}",
            f"Expected:     {self.expected}",
        ]
        if self.phase is not None:
            lines.append(f"Phase:        {self.phase}")
        lines.append("")

        if self.model is not None:
            lines.append(f"Objective: {self.model.objective_sense.value}")
            lines.append("")
            lines.append("Variables:")
            for var in self.model.variables:
                lines.append(f"  {var.name:20s} ∈ [{var.lower:12.6g}, {var.upper:12.6g}]"
                             f"  c = {var.obj_coeff:g}")
            lines.append("")
            lines.append("Constraints:")
            for con in self.model.constraints:
                lines.append(f"  {con.name:20s} {con.expression()}")
            lines.append("")

        lines.append("=" * 80)
        return "\n".join(lines)


# --- saboteur ----------------------------------------------------------------

class InjectionFailure(OrGymError):
    """An injector exhausted its candidates without producing a valid sabotage."""

    def __init__(self, error_type: str, reason: str, tried: int = 0):
        super().__init__(f"Type {error_type} injection failed: {reason}",
                         error_type=error_type, tried=tried)


class PoolExhausted(OrGymError):
    """Requested per-type counts could not be met from the pool."""

    def __init__(self, shortfall: Dict[str, int]):
        super().__init__("Could not meet requested instance counts", shortfall=shortfall)


class OracleDisagreement(OrGymError):
    """A stored instance disagrees with what the solver now reports."""

    def __init__(self, instance_id: str, expected: str, actual: str):
        super().__init__("Instance disagrees with the solver oracle",
                         instance_id=instance_id, expected=expected, actual=actual)


# --- environment -------------------------------------------------------------

class InvalidAction(OrGymError):
    """An action could not be executed (unknown target, malformed fields)."""

    def __init__(self, reason: str, kind: Optional[str] = None, target: Optional[str] = None):
        super().__init__(f"Invalid action: {reason}", kind=kind, target=target)


class EpisodeOver(OrGymError):
    """step() called on a finished episode."""

    def __init__(self, step: int):
        super().__init__("Episode already finished", step=step)


# --- evaluation --------------------------------------------------------------

class EmptyInput(OrGymError):
    """An aggregation received no records."""


class InsufficientPool(OrGymError):
    """Stratified sampling asked for more items than a stratum holds."""

    def __init__(self, stratum: str, requested: int, available: int):
        super().__init__(f"Not enough instances in stratum '{stratum}'",
                         stratum=stratum, requested=requested, available=available)


# --- bias bench --------------------------------------------------------------

class DomainError(OrGymError):
    """Argument outside the mathematical domain of a function."""


class NonMonotonePercentiles(OrGymError):
    """Percentiles are not strictly increasing."""

    def __init__(self, percentiles: Iterable[float]):
        super().__init__("Percentiles must satisfy P25 < P50 < P75",
                         percentiles=list(percentiles))


# --- agent protocol ----------------------------------------------------------

class AgentProtocolError(OrGymError):
    """Base for failures talking to an agent."""


class SpawnError(AgentProtocolError):
    """The agent process could not be started."""

    def __init__(self, command: List[str], reason: str):
        super().__init__(f"Could not start agent: {reason}", command=" ".join(command))


class AgentTimeoutError(AgentProtocolError):
    """The agent did not reply within the time limit."""

    def __init__(self, timeout: float, sequence_no: int):
        super().__init__("Agent reply timed out", timeout=timeout, sequence_no=sequence_no)


class ParseError(AgentProtocolError):
    """The agent reply was not a valid action message."""

    def __init__(self, reason: str, line: Optional[str] = None):
        snippet = line if line is None or len(line) <= 200 else line[:200] + "..."
        super().__init__(f"Malformed agent reply: {reason}", line=snippet)
