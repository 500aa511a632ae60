"""LP solving (dense two-phase simplex) and IIS computation."""

from .solve import (SolveStatus, SolverConfig, SolveResult, DEFAULT_CONFIG, SOLVER_NAME,
                    solve, constraint_slacks, violation, is_feasible, implied_range)
from .iis import IisReport, compute_iis, subsystem, is_infeasible_subsystem

__all__ = [
    'SolveStatus', 'SolverConfig', 'SolveResult', 'DEFAULT_CONFIG', 'SOLVER_NAME',
    'solve', 'constraint_slacks', 'violation', 'is_feasible', 'implied_range',
    'IisReport', 'compute_iis', 'subsystem', 'is_infeasible_subsystem',
]
