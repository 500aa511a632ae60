"""
Dense two-phase primal simplex with Bland's rule.

The model is brought to equality form over nonnegative columns:

    x_j = offset_j + sum(coef * y_col)     (one or two columns per variable)

Finite upper bounds of doubly bounded variables become extra rows. Rows
are sign-normalized so every right-hand side is nonnegative, then LE rows
start with their slack in the basis and GE/EQ rows with an artificial.

Entering column: lowest index with negative reduced cost. Leaving row:
minimum ratio, ties broken by the lowest basic column index. Both rules
together make every run deterministic and cycle-free.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..lp import LpModel, ObjectiveSense, Sense

logger = logging.getLogger(__name__)


class SimplexTimeout(Exception):
    pass


class SimplexIterationLimit(Exception):
    pass


@dataclass
class StandardForm:
    """Equality form of an LpModel (see module docstring)."""
    A: np.ndarray                     # rows x structural columns
    b: np.ndarray
    senses: List[Sense]
    cost: np.ndarray                  # minimization costs over structural columns
    cost_offset: float
    var_map: List[Tuple[float, List[Tuple[int, float]]]]   # per model variable: offset, (col, coef)
    row_owner: List[Optional[int]]    # model constraint index per row, None for bound rows

    @classmethod
    def from_model(cls, m: LpModel) -> "StandardForm":
        var_map: List[Tuple[float, List[Tuple[int, float]]]] = []
        bound_rows: List[Tuple[int, float]] = []
        ncols = 0
        for var in m.variables:
            lo, up = var.lower, var.upper
            if math.isfinite(lo):
                var_map.append((lo, [(ncols, 1.0)]))
                if math.isfinite(up):
                    bound_rows.append((ncols, up - lo))
                ncols += 1
            elif math.isfinite(up):
                var_map.append((up, [(ncols, -1.0)]))
                ncols += 1
            else:
                var_map.append((0.0, [(ncols, 1.0), (ncols + 1, -1.0)]))
                ncols += 2

        index = {v.name: j for j, v in enumerate(m.variables)}
        nrows = len(m.constraints) + len(bound_rows)
        A = np.zeros((nrows, ncols))
        b = np.zeros(nrows)
        senses: List[Sense] = []
        owner: List[Optional[int]] = []

        for i, con in enumerate(m.constraints):
            rhs = con.rhs
            for name, coef in con.terms.items():
                offset, cols = var_map[index[name]]
                rhs -= coef * offset
                for col, sign in cols:
                    A[i, col] += coef * sign
            b[i] = rhs
            senses.append(con.sense)
            owner.append(i)

        for k, (col, width) in enumerate(bound_rows):
            r = len(m.constraints) + k
            A[r, col] = 1.0
            b[r] = width
            senses.append(Sense.LE)
            owner.append(None)

        sign = 1.0 if m.objective_sense is ObjectiveSense.MIN else -1.0
        cost = np.zeros(ncols)
        cost_offset = 0.0
        for j, var in enumerate(m.variables):
            offset, cols = var_map[j]
            cost_offset += sign * var.obj_coeff * offset
            for col, s in cols:
                cost[col] += sign * var.obj_coeff * s
        return cls(A, b, senses, cost, cost_offset, var_map, owner)

    def model_values(self, y: np.ndarray, names: List[str]) -> Dict[str, float]:
        values = {}
        for name, (offset, cols) in zip(names, self.var_map):
            values[name] = float(offset + sum(coef * y[col] for col, coef in cols))
        return values


@dataclass
class SimplexOutcome:
    status: str                      # OPTIMAL / INFEASIBLE / UNBOUNDED
    y: np.ndarray                    # structural column values at the final basis
    row_duals: Optional[np.ndarray]  # d z / d b per standard-form row (minimization)
    iterations: int


class DenseSimplex:
    """
    Tableau simplex over a StandardForm.

    Args:
        feasibility_tol: phase-1 objective above this means infeasible
        optimality_tol: reduced costs below -tol are improving
        pivot_tol: smallest admissible pivot element
        max_iterations: hard cap over both phases
        deadline: time.monotonic() value after which SimplexTimeout is raised
    """

    def __init__(self, feasibility_tol: float = 1e-7, optimality_tol: float = 1e-9,
                 pivot_tol: float = 1e-9, max_iterations: int = 10000,
                 deadline: Optional[float] = None):
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.pivot_tol = pivot_tol
        self.max_iterations = max_iterations
        self.deadline = deadline
        self.iterations = 0

    # --- tableau primitives ------------------------------------------------------

    @staticmethod
    def _pivot(T: np.ndarray, row: int, col: int):
        T[row, :] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and T[r, col] != 0.0:
                T[r, :] -= T[r, col] * T[row, :]

    def _entering(self, d: np.ndarray, allowed: np.ndarray) -> int:
        candidates = np.nonzero((d < -self.optimality_tol) & allowed)[0]
        return int(candidates[0]) if candidates.size else -1

    def _leaving(self, T: np.ndarray, col: int, basis: List[int]) -> int:
        best_row, best_ratio, best_basic = -1, math.inf, math.inf
        for r in range(T.shape[0] - 1):
            a = T[r, col]
            if a > self.pivot_tol:
                ratio = T[r, -1] / a
                if ratio < best_ratio - 1e-12 or (abs(ratio - best_ratio) <= 1e-12 and basis[r] < best_basic):
                    best_row, best_ratio, best_basic = r, ratio, basis[r]
        return best_row

    def _tick(self):
        self.iterations += 1
        if self.iterations > self.max_iterations:
            raise SimplexIterationLimit()
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SimplexTimeout()

    def _run(self, T: np.ndarray, basis: List[int], allowed: np.ndarray) -> str:
        while True:
            self._tick()
            col = self._entering(T[-1, :-1], allowed)
            if col < 0:
                return "OPTIMAL"
            row = self._leaving(T, col, basis)
            if row < 0:
                return "UNBOUNDED"
            self._pivot(T, row, col)
            basis[row] = col

    # --- driver ---------------------------------------------------------------------

    def solve(self, sf: StandardForm, phase_one_only: bool = False) -> SimplexOutcome:
        m, n = sf.A.shape
        A = sf.A.copy()
        b = sf.b.copy()
        senses = list(sf.senses)
        row_sign = np.ones(m)
        for i in range(m):
            if b[i] < 0:
                A[i, :] *= -1.0
                b[i] *= -1.0
                row_sign[i] = -1.0
                if senses[i] is not Sense.EQ:
                    senses[i] = senses[i].flipped()

        slack_cols: Dict[int, int] = {}
        art_cols: Dict[int, int] = {}
        col = n
        for i in range(m):
            if senses[i] is not Sense.EQ:
                slack_cols[i] = col
                col += 1
        first_art = col
        for i in range(m):
            if senses[i] is not Sense.LE:
                art_cols[i] = col
                col += 1
        total = col

        A_eq = np.zeros((m, total))
        A_eq[:, :n] = A
        for i, c in slack_cols.items():
            A_eq[i, c] = 1.0 if senses[i] is Sense.LE else -1.0
        for i, c in art_cols.items():
            A_eq[i, c] = 1.0

        T = np.zeros((m + 1, total + 1))
        T[:m, :total] = A_eq
        T[:m, -1] = b
        basis = [slack_cols[i] if senses[i] is Sense.LE else art_cols[i] for i in range(m)]

        # Phase 1: minimize the sum of artificials.
        w = np.zeros(total)
        w[first_art:] = 1.0
        T[-1, :total] = w
        for i in range(m):
            if basis[i] >= first_art:
                T[-1, :] -= T[i, :]
        allowed = np.ones(total, dtype=bool)
        self._run(T, basis, allowed)

        y = self._structural_values(T, basis, n)
        infeasibility = -T[-1, -1]
        if infeasibility > self.feasibility_tol:
            return SimplexOutcome("INFEASIBLE", y, None, self.iterations)
        if phase_one_only:
            return SimplexOutcome("OPTIMAL", y, None, self.iterations)

        # Drive zero-level artificials out of the basis; drop redundant rows.
        keep_rows = []
        for r in range(m):
            if basis[r] >= first_art:
                nz = np.nonzero(np.abs(T[r, :first_art]) > self.pivot_tol)[0]
                if nz.size:
                    self._pivot(T, r, int(nz[0]))
                    basis[r] = int(nz[0])
                    keep_rows.append(r)
            else:
                keep_rows.append(r)

        rows = keep_rows
        T2 = np.zeros((len(rows) + 1, first_art + 1))
        T2[:-1, :first_art] = T[rows, :first_art]
        T2[:-1, -1] = np.maximum(T[rows, -1], 0.0)
        basis2 = [basis[r] for r in rows]

        c = np.zeros(first_art)
        c[:n] = sf.cost
        T2[-1, :first_art] = c
        for k, bc in enumerate(basis2):
            if c[bc] != 0.0:
                T2[-1, :] -= c[bc] * T2[k, :]
        allowed = np.ones(first_art, dtype=bool)
        status = self._run(T2, basis2, allowed)
        y = self._structural_values(T2, basis2, n)
        if status != "OPTIMAL":
            return SimplexOutcome(status, y, None, self.iterations)

        duals = np.zeros(m)
        if rows:
            B = A_eq[np.ix_(rows, basis2)]
            try:
                pi = np.linalg.solve(B.T, c[basis2])
            except np.linalg.LinAlgError:
                pi = np.linalg.lstsq(B.T, c[basis2], rcond=None)[0]
            for k, r in enumerate(rows):
                duals[r] = row_sign[r] * pi[k]
        return SimplexOutcome("OPTIMAL", y, duals, self.iterations)

    @staticmethod
    def _structural_values(T: np.ndarray, basis: List[int], n: int) -> np.ndarray:
        y = np.zeros(n)
        for r, bc in enumerate(basis):
            if bc < n:
                y[bc] = max(T[r, -1], 0.0)
        return y
