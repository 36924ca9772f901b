"""
LP engine interface.
"""

from abc import ABC, abstractmethod
from typing import Optional, Sequence

from .models import Basis, LinearProgram, LpSolution, Row


class LpEngine(ABC):
    """
    Abstract interface for a linear-programming engine.
    """

    @abstractmethod
    def solve(self, lp: LinearProgram, basis: Optional[Basis] = None) -> LpSolution:
        """
        Solve the LP to optimality, or report it infeasible or unbounded.
        A basis from an earlier solve of the same LP (possibly with different
        bounds or fewer rows) may be passed as a starting point.
        """
        pass

    @abstractmethod
    def add_rows_and_resolve(self, lp: LinearProgram, solution: LpSolution, rows: Sequence[Row]) -> LpSolution:
        """
        Append rows to `lp` and return the optimum of the augmented LP.
        `solution` must be an optimal solution of `lp` before the append.
        """
        pass

    def add_row_and_resolve(self, lp: LinearProgram, solution: LpSolution, row: Row) -> LpSolution:
        """
        Single-row form of add_rows_and_resolve.
        """
        return self.add_rows_and_resolve(lp, solution, [row])
