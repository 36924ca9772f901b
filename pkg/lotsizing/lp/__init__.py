"""
Linear-programming core shared by the formulations, the branch-and-cut driver
and the oracles.

Key Components:

- **models**: LinearProgram, Row, Basis, LpSolution
- **interfaces**: the LpEngine contract
- **backends**: concrete engines
- **engine_factory**: environment-driven engine selection
"""

from typing import Optional

from .engine_factory import get_lp_engine
from .interfaces import LpEngine
from .models import Basis, ConstraintSense, LinearProgram, LpSolution, LpStatus, Row, make_row


def solve_lp(lp: LinearProgram, engine: Optional[LpEngine] = None) -> LpSolution:
    """Solve `lp` with the given engine, or the shared one."""
    return (engine or get_lp_engine()).solve(lp)


def add_row_and_resolve(lp: LinearProgram, solution: LpSolution, row: Row, engine: Optional[LpEngine] = None) -> LpSolution:
    """Append `row` to `lp` and re-optimize from `solution`."""
    return (engine or get_lp_engine()).add_row_and_resolve(lp, solution, row)


__all__ = [
    "Basis",
    "ConstraintSense",
    "LinearProgram",
    "LpEngine",
    "LpSolution",
    "LpStatus",
    "Row",
    "add_row_and_resolve",
    "get_lp_engine",
    "make_row",
    "solve_lp",
]
