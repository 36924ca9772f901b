"""
Reference LP engine: textbook two-phase primal simplex with Bland's rule.

Slow but easy to audit. It is the default engine of
the enumeration oracles and the cross-check for the production engine in tests.
Columns need finite lower bounds; finite upper bounds become rows.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from lotsizing.errors import NumericalFailureError
from lotsizing.lp.interfaces import LpEngine
from lotsizing.lp.models import Basis, ConstraintSense, LinearProgram, LpSolution, LpStatus, Row

logger = logging.getLogger(__name__)

EPS = 1e-9
PHASE_ONE_TOL = 1e-7
MAX_PIVOTS = 200000


class DenseTableauSimplex(LpEngine):
    """
    Two-phase primal simplex on a full tableau, Bland's rule throughout.
    """

    def solve(self, lp: LinearProgram, basis: Optional[Basis] = None) -> LpSolution:
        lower, upper = lp.bounds()
        if not np.all(np.isfinite(lower)):
            raise ValueError("reference engine requires finite lower bounds")
        A_user, b_user, senses = lp.dense()
        nvars = lp.num_cols
        shift = A_user @ lower if nvars else np.zeros(lp.num_rows)

        # rows of the shifted problem x' = x - lower >= 0
        rows_A = [A_user[r] for r in range(lp.num_rows)]
        rows_b = [b_user[r] - shift[r] for r in range(lp.num_rows)]
        rows_sense = list(senses)
        for j in range(nvars):
            if math.isfinite(upper[j]):
                e = np.zeros(nvars)
                e[j] = 1.0
                rows_A.append(e)
                rows_b.append(upper[j] - lower[j])
                rows_sense.append(ConstraintSense.LE)
        num_std_rows = len(rows_A)

        slack_cols = [r for r in range(num_std_rows) if rows_sense[r] != ConstraintSense.EQ]
        slack_of = {r: nvars + p for p, r in enumerate(slack_cols)}
        width = nvars + len(slack_cols)
        A = np.zeros((num_std_rows, width))
        b = np.zeros(num_std_rows)
        flipped = np.zeros(num_std_rows, dtype=bool)
        for r in range(num_std_rows):
            A[r, :nvars] = rows_A[r]
            if rows_sense[r] == ConstraintSense.LE:
                A[r, slack_of[r]] = 1.0
            elif rows_sense[r] == ConstraintSense.GE:
                A[r, slack_of[r]] = -1.0
            b[r] = rows_b[r]
            if b[r] < 0:
                A[r] = -A[r]
                b[r] = -b[r]
                flipped[r] = True

        basic = np.full(num_std_rows, -1, dtype=int)
        for r in range(num_std_rows):
            if r in slack_of and A[r, slack_of[r]] == 1.0:
                basic[r] = slack_of[r]
        needs_artificial = np.flatnonzero(basic < 0)
        num_art = len(needs_artificial)
        tableau = np.zeros((num_std_rows, width + num_art + 1))
        tableau[:, :width] = A
        tableau[:, -1] = b
        for p, r in enumerate(needs_artificial):
            tableau[r, width + p] = 1.0
            basic[r] = width + p

        pivots = 0
        if num_art:
            phase_one = np.zeros(width + num_art)
            phase_one[width:] = 1.0
            status, pivots = _run(tableau, basic, phase_one, width + num_art, pivots)
            value = float(phase_one[basic] @ tableau[:, -1])
            if value > PHASE_ONE_TOL * max(1.0, float(np.max(np.abs(b), initial=0.0))):
                return LpSolution(status=LpStatus.INFEASIBLE, iterations=pivots)
            tableau, basic, kept = _drive_out_artificials(tableau, basic, width)
        else:
            kept = np.arange(num_std_rows)
        tableau = np.hstack([tableau[:, :width], tableau[:, -1:]])

        cost = np.zeros(width)
        cost[:nvars] = lp.cost
        status, pivots = _run(tableau, basic, cost, width, pivots)
        if status == LpStatus.UNBOUNDED:
            return LpSolution(status=LpStatus.UNBOUNDED, iterations=pivots)

        values = np.zeros(width)
        values[basic] = tableau[:, -1]
        x = values[:nvars] + lower

        # duals from the final basis of the standard-form rows that survived
        y = np.zeros(num_std_rows)
        if len(kept):
            B = A[np.ix_(kept, basic)]
            try:
                y[kept] = np.linalg.solve(B.T, cost[basic])
            except np.linalg.LinAlgError as exc:
                raise NumericalFailureError("singular final basis") from exc
        y = np.where(flipped, -y, y)
        duals = y[: lp.num_rows]
        reduced = np.asarray(lp.cost, dtype=float) - (A_user.T @ duals if lp.num_rows else 0.0)
        return LpSolution(
            status=LpStatus.OPTIMAL,
            objective=lp.objective(x),
            x=x,
            duals=duals,
            reduced_costs=reduced,
            iterations=pivots,
        )

    def add_rows_and_resolve(self, lp: LinearProgram, solution: LpSolution, rows: Sequence[Row]) -> LpSolution:
        for row in rows:
            lp.add_row(row)
        return self.solve(lp)


def _run(tableau: np.ndarray, basic: np.ndarray, cost: np.ndarray, ncols: int, pivots: int) -> tuple[LpStatus, int]:
    """Primal simplex with Bland's rule over the first `ncols` columns."""
    while True:
        if pivots > MAX_PIVOTS:
            raise NumericalFailureError(f"tableau simplex exceeded {MAX_PIVOTS} pivots")
        reduced = cost[:ncols] - cost[basic] @ tableau[:, :ncols]
        reduced[basic] = 0.0
        entering = np.flatnonzero(reduced < -EPS)
        if entering.size == 0:
            return LpStatus.OPTIMAL, pivots
        q = int(entering[0])
        column = tableau[:, q]
        positive = np.flatnonzero(column > EPS)
        if positive.size == 0:
            return LpStatus.UNBOUNDED, pivots
        ratios = tableau[positive, -1] / column[positive]
        best = np.min(ratios)
        ties = positive[ratios <= best + EPS]
        r = int(ties[np.argmin(basic[ties])])
        _pivot(tableau, r, q)
        basic[r] = q
        pivots += 1


def _pivot(tableau: np.ndarray, r: int, q: int) -> None:
    tableau[r] /= tableau[r, q]
    column = tableau[:, q].copy()
    column[r] = 0.0
    tableau -= np.outer(column, tableau[r])


def _drive_out_artificials(
    tableau: np.ndarray, basic: np.ndarray, width: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pivot basic artificials out; rows where that is impossible are redundant and dropped."""
    keep = np.ones(tableau.shape[0], dtype=bool)
    for r in range(tableau.shape[0]):
        if basic[r] < width:
            continue
        candidates = np.flatnonzero(np.abs(tableau[r, :width]) > EPS)
        if candidates.size == 0:
            keep[r] = False
            continue
        q = int(candidates[0])
        _pivot(tableau, r, q)
        basic[r] = q
    if not keep.all():
        logger.debug("Dropping %d redundant rows after phase one", int((~keep).sum()))
    return tableau[keep], basic[keep], np.flatnonzero(keep)
