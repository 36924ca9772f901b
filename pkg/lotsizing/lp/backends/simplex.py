"""
Bounded-variable dual simplex on a dense tableau.

Every row gets a slack column (a.x + s = b) whose bounds encode the sense, so
the all-slack basis always exists. Any starting basis is made dual feasible by
placing each nonbasic column at the bound its reduced cost asks for; when that
bound is infinite a large artificial bound stands in, and an optimum resting on
an artificial bound is reported as unbounded.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from lotsizing.errors import NumericalFailureError
from lotsizing.lp.interfaces import LpEngine
from lotsizing.lp.models import Basis, ConstraintSense, LinearProgram, LpSolution, LpStatus, Row

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-6
DUAL_TOL = 1e-9
DEGENERATE_STEP = 1e-12
DEGENERATE_LIMIT = 5000
REFACTOR_INTERVAL = 100
ARTIFICIAL_SCALE = 1e7


def _slack_bounds(sense: ConstraintSense) -> tuple[float, float]:
    if sense == ConstraintSense.LE:
        return 0.0, math.inf
    if sense == ConstraintSense.GE:
        return -math.inf, 0.0
    return 0.0, 0.0


class _Tableau:
    """
    Working state of one dual simplex run over structural + slack columns.
    """

    def __init__(self, lp: LinearProgram, basis: Optional[Basis]):
        A, b, senses = lp.dense()
        self.num_struct = lp.num_cols
        self.num_rows = lp.num_rows
        self.A = np.hstack([A, np.eye(self.num_rows)])
        self.b = b
        self.cost = np.concatenate([np.asarray(lp.cost, dtype=float), np.zeros(self.num_rows)])
        lower, upper = lp.bounds()
        slack = [_slack_bounds(s) for s in senses]
        self.lower = np.concatenate([lower, np.asarray([lo for lo, _ in slack], dtype=float)])
        self.upper = np.concatenate([upper, np.asarray([up for _, up in slack], dtype=float)])
        finite = [abs(v) for v in np.concatenate([self.lower, self.upper, self.b]) if math.isfinite(v)]
        self.big = ARTIFICIAL_SCALE * max([1.0] + finite)
        self.artificial: set[int] = set()
        self.iterations = 0
        self.degenerate = 0
        self.since_refactor = 0

        ncols = self.num_struct + self.num_rows
        self.at_upper = np.zeros(ncols, dtype=bool)
        self.basic = np.arange(self.num_struct, ncols)
        if basis is not None and basis.num_cols == self.num_struct and len(basis.basic) <= self.num_rows:
            start = list(basis.basic) + [self.num_struct + r for r in range(len(basis.basic), self.num_rows)]
            self.basic = np.asarray(start, dtype=int)
            for j in basis.at_upper:
                if j < ncols:
                    self.at_upper[j] = True
        try:
            self._factor()
        except NumericalFailureError:
            logger.debug("Starting basis singular, falling back to slack basis")
            self.basic = np.arange(self.num_struct, ncols)
            self.at_upper[:] = False
            self._factor()

    @property
    def num_total(self) -> int:
        return self.num_struct + self.num_rows

    def copy(self) -> "_Tableau":
        other = object.__new__(_Tableau)
        other.__dict__.update(self.__dict__)
        for name in ("A", "b", "cost", "lower", "upper", "at_upper", "basic", "T", "beta", "d"):
            setattr(other, name, getattr(self, name).copy())
        other.artificial = set(self.artificial)
        return other

    def _is_basic(self) -> np.ndarray:
        mask = np.zeros(self.num_total, dtype=bool)
        mask[self.basic] = True
        return mask

    def _nonbasic_values(self) -> np.ndarray:
        lower = np.where(np.isfinite(self.lower), self.lower, 0.0)
        upper = np.where(np.isfinite(self.upper), self.upper, 0.0)
        values = np.where(self.at_upper, upper, lower)
        values[self.basic] = 0.0
        return values

    def _place(self, j: int, want_upper: bool) -> None:
        """Rest nonbasic column j on a bound, creating an artificial one if needed."""
        if want_upper and not math.isfinite(self.upper[j]):
            self.upper[j] = self.big
            self.artificial.add(j)
        if not want_upper and not math.isfinite(self.lower[j]):
            self.lower[j] = -self.big
            self.artificial.add(j)
        self.at_upper[j] = want_upper

    def _restore_dual_feasibility(self) -> None:
        basic = self._is_basic()
        for j in np.flatnonzero(~basic):
            if self.lower[j] == self.upper[j]:
                self.at_upper[j] = False
                continue
            if self.d[j] < -DUAL_TOL:
                if not self.at_upper[j] or not math.isfinite(self.upper[j]):
                    self._place(j, True)
            elif self.d[j] > DUAL_TOL:
                if self.at_upper[j] or not math.isfinite(self.lower[j]):
                    self._place(j, False)
            elif self.at_upper[j] and not math.isfinite(self.upper[j]):
                self._place(j, False)
            elif not self.at_upper[j] and not math.isfinite(self.lower[j]):
                self._place(j, math.isfinite(self.upper[j]))
        self.at_upper[self.basic] = False

    def _factor(self) -> None:
        B = self.A[:, self.basic]
        try:
            self.T = np.linalg.solve(B, self.A) if self.num_rows else np.zeros((0, self.num_total))
            binv_b = np.linalg.solve(B, self.b) if self.num_rows else np.zeros(0)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError("singular basis matrix") from exc
        self.d = self.cost - self.cost[self.basic] @ self.T
        self.d[self.basic] = 0.0
        self._restore_dual_feasibility()
        self.beta = binv_b - self.T @ self._nonbasic_values()
        self.since_refactor = 0

    def extend(self, rows: Sequence[Row]) -> None:
        """Append rows; their slacks enter the basis."""
        if not rows:
            return
        extra = len(rows)
        old_total = self.num_total
        values = self._full_values()
        new_A = np.zeros((extra, self.num_struct))
        new_b = np.zeros(extra)
        bounds = []
        for p, row in enumerate(rows):
            for index, value in zip(row.indices, row.values):
                new_A[p, index] += value
            new_b[p] = row.rhs
            bounds.append(_slack_bounds(row.sense))

        def widen(matrix: np.ndarray) -> np.ndarray:
            return np.hstack([matrix, np.zeros((matrix.shape[0], extra))])

        self.A = np.vstack([widen(self.A), np.hstack([new_A, np.zeros((extra, self.num_rows)), np.eye(extra)])])
        self.b = np.concatenate([self.b, new_b])
        self.cost = np.concatenate([self.cost, np.zeros(extra)])
        self.lower = np.concatenate([self.lower, [lo for lo, _ in bounds]])
        self.upper = np.concatenate([self.upper, [up for _, up in bounds]])
        self.at_upper = np.concatenate([self.at_upper, np.zeros(extra, dtype=bool)])
        self.d = np.concatenate([self.d, np.zeros(extra)])

        T = widen(self.T)
        full_rows = self.A[self.num_rows :, :]
        new_T = full_rows - full_rows[:, self.basic] @ T
        self.T = np.vstack([T, new_T])
        new_slacks = np.arange(old_total, old_total + extra)
        self.basic = np.concatenate([self.basic, new_slacks])
        self.beta = np.concatenate([self.beta, new_b - new_A @ values[: self.num_struct]])
        self.num_rows += extra

    def _full_values(self) -> np.ndarray:
        values = self._nonbasic_values()
        values[self.basic] = self.beta
        return values

    def _choose_leaving(self, bland: bool) -> Optional[int]:
        lo = self.lower[self.basic]
        up = self.upper[self.basic]
        below = lo - self.beta
        above = self.beta - up
        infeas = np.maximum(below, above)
        candidates = np.flatnonzero(infeas > FEAS_TOL)
        if candidates.size == 0:
            return None
        if bland:
            return int(candidates[np.argmin(self.basic[candidates])])
        return int(candidates[np.argmax(infeas[candidates])])

    def _choose_entering(self, r: int, to_lower: bool, bland: bool) -> Optional[int]:
        alpha = self.T[r]
        movable = ~self._is_basic() & (self.lower != self.upper)
        if to_lower:
            eligible = movable & ((~self.at_upper & (alpha < -PIVOT_TOL)) | (self.at_upper & (alpha > PIVOT_TOL)))
        else:
            eligible = movable & ((~self.at_upper & (alpha > PIVOT_TOL)) | (self.at_upper & (alpha < -PIVOT_TOL)))
        candidates = np.flatnonzero(eligible)
        if candidates.size == 0:
            return None
        step = np.abs(self.d[candidates]) / np.abs(alpha[candidates])
        if bland:
            best = np.min(step)
            ties = candidates[step <= best + DEGENERATE_STEP]
            return int(ties.min())
        # Harris two-pass: relaxed bound on the step, then the largest pivot under it
        relaxed = (np.abs(self.d[candidates]) + DUAL_TOL) / np.abs(alpha[candidates])
        limit = np.min(relaxed)
        within = candidates[step <= limit]
        return int(within[np.argmax(np.abs(alpha[within]))])

    def _pivot(self, r: int, q: int, to_lower: bool) -> None:
        alpha_row = self.T[r].copy()
        column = self.T[:, q].copy()
        pivot = alpha_row[q]
        leaving = int(self.basic[r])
        bound = self.lower[leaving] if to_lower else self.upper[leaving]
        entering_value = self.upper[q] if self.at_upper[q] else self.lower[q]

        theta_p = (self.beta[r] - bound) / pivot
        self.beta -= theta_p * column
        self.beta[r] = entering_value + theta_p

        theta_d = self.d[q] / pivot
        if abs(theta_d) <= DEGENERATE_STEP:
            self.degenerate += 1
        self.d -= theta_d * alpha_row
        self.d[q] = 0.0

        self.T[r] /= pivot
        column[r] = 0.0
        self.T -= np.outer(column, self.T[r])

        self.basic[r] = q
        self.at_upper[q] = False
        self.at_upper[leaving] = not to_lower
        self.iterations += 1
        self.since_refactor += 1

    def run(self) -> LpStatus:
        max_iterations = 20000 + 50 * self.num_total
        checked = False
        while True:
            if self.iterations > max_iterations:
                raise NumericalFailureError(f"dual simplex exceeded {max_iterations} iterations")
            if self.since_refactor >= REFACTOR_INTERVAL:
                self._factor()
            bland = self.degenerate > DEGENERATE_LIMIT
            r = self._choose_leaving(bland)
            if r is None:
                if self.since_refactor > 0 and not checked:
                    self._factor()
                    checked = True
                    continue
                return LpStatus.OPTIMAL
            checked = False
            leaving = self.basic[r]
            to_lower = self.beta[r] < self.lower[leaving]
            q = self._choose_entering(r, to_lower, bland)
            if q is None:
                if self.since_refactor > 0:
                    self._factor()
                    continue
                return LpStatus.INFEASIBLE
            self._pivot(r, q, to_lower)

    def solution(self, status: LpStatus) -> LpSolution:
        if status != LpStatus.OPTIMAL:
            return LpSolution(status=status, iterations=self.iterations)
        values = self._full_values()
        for j in self.artificial:
            if abs(values[j]) >= 0.5 * self.big:
                return LpSolution(status=LpStatus.UNBOUNDED, iterations=self.iterations)
        x = values[: self.num_struct].copy()
        at_upper = frozenset(int(j) for j in np.flatnonzero(self.at_upper) if j not in self.artificial)
        solution = LpSolution(
            status=LpStatus.OPTIMAL,
            objective=float(self.cost[: self.num_struct] @ x),
            x=x,
            duals=-self.d[self.num_struct :].copy(),
            reduced_costs=self.d[: self.num_struct].copy(),
            basis=Basis(num_cols=self.num_struct, basic=tuple(int(j) for j in self.basic), at_upper=at_upper),
            iterations=self.iterations,
        )
        solution._state = self
        return solution


class BoundedDualSimplex(LpEngine):
    """
    Production LP engine: dense bounded dual simplex with warm starts.
    """

    def solve(self, lp: LinearProgram, basis: Optional[Basis] = None) -> LpSolution:
        tableau = _Tableau(lp, basis)
        status = tableau.run()
        return tableau.solution(status)

    def add_rows_and_resolve(self, lp: LinearProgram, solution: LpSolution, rows: Sequence[Row]) -> LpSolution:
        state = solution._state
        stale = state is None or state.num_rows != lp.num_rows or state.num_struct != lp.num_cols
        for row in rows:
            lp.add_row(row)
        if stale:
            return self.solve(lp, solution.basis)
        tableau = state.copy()
        tableau.iterations = 0
        tableau.extend(rows)
        status = tableau.run()
        return tableau.solution(status)

