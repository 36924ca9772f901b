"""
Linear program containers shared by every LP engine.
"""

import math
from enum import Enum
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

INF = math.inf


class ConstraintSense(str, Enum):
    GE = ">="
    LE = "<="
    EQ = "="


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class Row(BaseModel):
    """Sparse constraint row: sum(values[p] * x[indices[p]]) sense rhs."""

    model_config = ConfigDict(frozen=True)

    indices: tuple[int, ...]
    values: tuple[float, ...]
    sense: ConstraintSense
    rhs: float
    name: str = ""

    @field_validator("rhs")
    @classmethod
    def _rhs_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("rhs must be finite")
        return v

    @field_validator("values")
    @classmethod
    def _values_finite(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(not math.isfinite(value) for value in v):
            raise ValueError("coefficients must be finite")
        return v

    def activity(self, x: np.ndarray) -> float:
        return float(sum(value * x[index] for index, value in zip(self.indices, self.values)))


class LinearProgram:
    """
    Minimization LP over bounded columns.

    Column and row indices are dense and stable: appending never renumbers.
    A LinearProgram is owned by one solve at a time; use `copy()` to share.
    """

    def __init__(self):
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.cost: list[float] = []
        self.names: list[str] = []
        self.rows: list[Row] = []

    @property
    def num_cols(self) -> int:
        return len(self.cost)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_column(self, lower: float = 0.0, upper: float = INF, cost: float = 0.0, name: str = "") -> int:
        if lower > upper:
            raise ValueError(f"column {name or len(self.cost)}: lower bound must not exceed upper bound")
        if math.isnan(cost) or math.isinf(cost):
            raise ValueError("cost must be finite")
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.cost.append(float(cost))
        self.names.append(name or f"c{len(self.cost) - 1}")
        return len(self.cost) - 1

    def add_row(self, row: Row) -> int:
        for index in row.indices:
            if index < 0 or index >= self.num_cols:
                raise ValueError(f"row {row.name!r} references unknown column {index}")
        self.rows.append(row)
        return len(self.rows) - 1

    def set_bounds(self, column: int, lower: float, upper: float) -> None:
        if lower > upper:
            raise ValueError(f"column {column}: lower bound must not exceed upper bound")
        self.lower[column] = float(lower)
        self.upper[column] = float(upper)

    def copy(self) -> "LinearProgram":
        other = LinearProgram()
        other.lower = list(self.lower)
        other.upper = list(self.upper)
        other.cost = list(self.cost)
        other.names = list(self.names)
        other.rows = list(self.rows)
        return other

    def dense(self) -> tuple[np.ndarray, np.ndarray, list[ConstraintSense]]:
        """Dense (A, b, senses) view of the rows."""
        A = np.zeros((self.num_rows, self.num_cols))
        b = np.zeros(self.num_rows)
        for r, row in enumerate(self.rows):
            for index, value in zip(row.indices, row.values):
                A[r, index] += value
            b[r] = row.rhs
        return A, b, [row.sense for row in self.rows]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)

    def objective(self, x: np.ndarray) -> float:
        return float(np.dot(np.asarray(self.cost), x))

    def max_violation(self, x: np.ndarray) -> float:
        """Largest bound or row violation of x (0 when feasible)."""
        lower, upper = self.bounds()
        worst = float(max(0.0, np.max(lower - x, initial=0.0), np.max(x - upper, initial=0.0)))
        for row in self.rows:
            act = row.activity(x)
            if row.sense == ConstraintSense.GE:
                worst = max(worst, row.rhs - act)
            elif row.sense == ConstraintSense.LE:
                worst = max(worst, act - row.rhs)
            else:
                worst = max(worst, abs(act - row.rhs))
        return worst


class Basis(BaseModel):
    """
    Simplex basis snapshot: basic column per row position plus the nonbasic
    columns resting at their upper bound. Slack of row r is column num_cols + r.
    """

    model_config = ConfigDict(frozen=True)

    num_cols: int
    basic: tuple[int, ...]
    at_upper: frozenset[int] = frozenset()


class LpSolution(BaseModel):
    """Result of one LP solve."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: LpStatus
    objective: float = Field(default=math.nan, description="Objective value when optimal")
    x: Optional[np.ndarray] = Field(default=None, description="Primal values of the structural columns")
    duals: Optional[np.ndarray] = Field(default=None, description="One multiplier per row")
    reduced_costs: Optional[np.ndarray] = None
    basis: Optional[Basis] = None
    iterations: int = 0

    _state: Any = PrivateAttr(default=None)

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL

    def dual_objective(self, lp: LinearProgram) -> float:
        """b'y plus the bound terms of the nonbasic columns."""
        if self.duals is None or self.reduced_costs is None or self.x is None:
            return math.nan
        b = np.asarray([row.rhs for row in lp.rows], dtype=float)
        return float(np.dot(b, self.duals) + np.dot(self.reduced_costs, self.x))


def make_row(terms: Sequence[tuple[int, float]], sense: ConstraintSense, rhs: float, name: str = "") -> Row:
    """Build a Row from (column, coefficient) pairs, merging repeats and dropping zeros."""
    merged: dict[int, float] = {}
    for index, value in terms:
        merged[index] = merged.get(index, 0.0) + float(value)
    items = sorted((index, value) for index, value in merged.items() if value != 0.0)
    return Row(
        indices=tuple(index for index, _ in items),
        values=tuple(value for _, value in items),
        sense=sense,
        rhs=float(rhs),
        name=name,
    )
