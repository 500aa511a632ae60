"""
Error-type taxonomy and difficulty tiers.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"
    EXPERT = "expert"


class ErrorType(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"
    I = "I"

    @property
    def info(self) -> "ErrorTypeInfo":
        return ERROR_TYPES[self]

    @property
    def anonymized(self) -> bool:
        """Types whose constraint names are replaced by opaque ids."""
        return self in (ErrorType.G, ErrorType.H, ErrorType.I)


@dataclass(frozen=True)
class ErrorTypeInfo:
    code: ErrorType
    name: str
    target_iis_range: Tuple[int, int]
    difficulty: Difficulty

    @property
    def tier(self) -> Difficulty:
        """Calibration tier; the Medium label (Type B) calibrates with the Easy tier."""
        return TIER_OF_LABEL[self.difficulty]

    def in_range(self, iis_size: int) -> bool:
        lo, hi = self.target_iis_range
        return lo <= iis_size <= hi


ERROR_TYPES: Dict[ErrorType, ErrorTypeInfo] = {
    ErrorType.A: ErrorTypeInfo(ErrorType.A, "Direction Flip", (2, 3), Difficulty.EASY),
    ErrorType.B: ErrorTypeInfo(ErrorType.B, "RHS Miscalculation", (3, 5), Difficulty.MEDIUM),
    ErrorType.C: ErrorTypeInfo(ErrorType.C, "Upper Bound Conflict", (2, 3), Difficulty.EASY),
    ErrorType.D: ErrorTypeInfo(ErrorType.D, "Lower Bound Conflict", (2, 4), Difficulty.EASY),
    ErrorType.E: ErrorTypeInfo(ErrorType.E, "Resource Over-allocation", (5, 8), Difficulty.HARD),
    ErrorType.F: ErrorTypeInfo(ErrorType.F, "Capacity Violation", (5, 7), Difficulty.HARD),
    ErrorType.G: ErrorTypeInfo(ErrorType.G, "Flow Imbalance", (6, 10), Difficulty.HARD),
    ErrorType.H: ErrorTypeInfo(ErrorType.H, "Multi-constraint Conflict", (8, 12), Difficulty.EXPERT),
    ErrorType.I: ErrorTypeInfo(ErrorType.I, "Composite Error", (10, 15), Difficulty.EXPERT),
}

TIER_OF_LABEL: Dict[Difficulty, Difficulty] = {
    Difficulty.EASY: Difficulty.EASY,
    Difficulty.MEDIUM: Difficulty.EASY,
    Difficulty.HARD: Difficulty.HARD,
    Difficulty.EXPERT: Difficulty.EXPERT,
}

# Tier targets by IIS size; 8-10 overlaps between Hard and Expert.
EASY_MAX_IIS = 4
HARD_MAX_IIS = 10
EXPERT_MIN_IIS = 8


def difficulty_for(iis_size: int, error_type: ErrorType) -> Difficulty:
    """
    Tier of an instance.

    A size inside the type's calibrated range takes the type's tier, so
    Type B at 5 stays Easy and H at 9 is Expert. Other sizes fall back to
    the size thresholds, with the 8-10 overlap going to Expert for H/I.
    """
    info = ErrorType(error_type).info
    if info.in_range(iis_size):
        return info.tier
    if iis_size <= EASY_MAX_IIS:
        return Difficulty.EASY
    if iis_size < EXPERT_MIN_IIS:
        return Difficulty.HARD
    if iis_size <= HARD_MAX_IIS:
        return Difficulty.EXPERT if error_type in (ErrorType.H, ErrorType.I) else Difficulty.HARD
    return Difficulty.EXPERT
