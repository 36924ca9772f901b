"""
MIP models of the chance-constrained lot-sizing problem.

Four formulations share one variable naming scheme (`VarRef`):

- DEP: the big-M deterministic equivalent with per-scenario inventory s[j, t].
- COMPACT: inventory aggregated into one Theta' variable per period, bounded
  below by k+1 supporting lines per period.
- BENDERS_MASTER: inventory replaced by one theta variable per scenario, filled
  in by optimality cuts.
- RISK_FREE: for k = 0 only, the uncapacitated lot-sizing problem on the
  per-period largest cumulative demand.

Models are immutable blueprints. `MipModel.to_lp()` produces a fresh
`LinearProgram` for each solve; binary flags are metadata the solver enforces.
"""

import logging
import math
from enum import Enum
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from .errors import ModelMismatchError
from .instance import DemandStats, Instance, demand_stats
from .lp.models import INF, ConstraintSense, LinearProgram, Row, make_row

if TYPE_CHECKING:
    from .cuts.models import Cut

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-6


class Formulation(str, Enum):
    DEP = "dep"
    COMPACT = "compact"
    BENDERS_MASTER = "benders"
    RISK_FREE = "risk-free"


class VarKind(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    THETA_PRIME = "thetaPrime"
    THETA = "theta"


_ARITY = {VarKind.X: 1, VarKind.Y: 1, VarKind.Z: 1, VarKind.S: 2, VarKind.THETA_PRIME: 1, VarKind.THETA: 1}


class VarRef(BaseModel):
    """
    Name of one model variable: x(i), y(i), z(j), s(j, i), thetaPrime(i) or theta(j).
    """

    model_config = ConfigDict(frozen=True)

    kind: VarKind
    index: tuple[int, ...]

    @model_validator(mode="after")
    def _check_index(self) -> "VarRef":
        if len(self.index) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind.value} takes {_ARITY[self.kind]} index value(s)")
        if any(i < 0 for i in self.index):
            raise ValueError("indices must be nonnegative")
        return self

    @classmethod
    def x(cls, i: int) -> "VarRef":
        return cls(kind=VarKind.X, index=(i,))

    @classmethod
    def y(cls, i: int) -> "VarRef":
        return cls(kind=VarKind.Y, index=(i,))

    @classmethod
    def z(cls, j: int) -> "VarRef":
        return cls(kind=VarKind.Z, index=(j,))

    @classmethod
    def s(cls, j: int, i: int) -> "VarRef":
        return cls(kind=VarKind.S, index=(j, i))

    @classmethod
    def theta_prime(cls, i: int) -> "VarRef":
        return cls(kind=VarKind.THETA_PRIME, index=(i,))

    @classmethod
    def theta(cls, j: int) -> "VarRef":
        return cls(kind=VarKind.THETA, index=(j,))

    def __str__(self) -> str:
        return f"{self.kind.value}[{','.join(str(i) for i in self.index)}]"


class Column(BaseModel):
    model_config = ConfigDict(frozen=True)

    ref: VarRef
    lower: float = 0.0
    upper: float = INF
    cost: float = 0.0
    binary: bool = False


class ModelPoint(BaseModel):
    """
    A point of a model's variable space split by kind. Arrays of kinds the
    model does not own are None.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: Optional[np.ndarray] = Field(default=None, description="m x n inventory, DEP only")
    theta_prime: Optional[np.ndarray] = None
    theta: Optional[np.ndarray] = None

    def value(self, ref: VarRef) -> float:
        array = {
            VarKind.X: self.x,
            VarKind.Y: self.y,
            VarKind.Z: self.z,
            VarKind.S: self.s,
            VarKind.THETA_PRIME: self.theta_prime,
            VarKind.THETA: self.theta,
        }[ref.kind]
        if array is None:
            raise ModelMismatchError(f"point has no {ref.kind.value} variables")
        return float(array[ref.index])


class MipModel(BaseModel):
    """
    Column table, row list and objective of one formulation.

    Columns are laid out by kind in the order x, y, z and then s (scenario
    major), Theta' or theta. `offset` is a constant added to every objective
    value (nonzero only for the risk-free model).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    formulation: Formulation
    instance: Instance
    stats: DemandStats
    columns: tuple[Column, ...]
    rows: tuple[Row, ...]
    offset: float = 0.0

    _index: dict[VarRef, int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._index = {column.ref: p for p, column in enumerate(self.columns)}

    @property
    def num_cols(self) -> int:
        return len(self.columns)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def owns(self, kind: VarKind) -> bool:
        return any(column.ref.kind == kind for column in self.columns)

    def column(self, ref: VarRef) -> int:
        try:
            return self._index[ref]
        except KeyError:
            raise ModelMismatchError(f"{self.formulation.value} model has no variable {ref}") from None

    def columns_of(self, kind: VarKind) -> list[int]:
        return [p for p, column in enumerate(self.columns) if column.ref.kind == kind]

    def binary_columns(self) -> list[int]:
        """Binary columns, x before z."""
        return self.columns_of(VarKind.X) + self.columns_of(VarKind.Z)

    def to_lp(self) -> LinearProgram:
        lp = LinearProgram()
        for column in self.columns:
            lp.add_column(column.lower, column.upper, column.cost, str(column.ref))
        for row in self.rows:
            lp.add_row(row)
        return lp

    def cut_row(self, cut: "Cut") -> Row:
        """Translate a cut over VarRefs into an LP row over this model's columns."""
        terms = []
        for ref, coef in cut.terms:
            if ref not in self._index:
                raise ModelMismatchError(f"{cut.family.value} cut references {ref}, which the {self.formulation.value} model does not own")
            terms.append((self._index[ref], coef))
        return make_row(terms, ConstraintSense.GE, cut.rhs, cut.name)

    def point(self, values: np.ndarray) -> ModelPoint:
        values = np.asarray(values, dtype=float)
        inst = self.instance

        def gather(kind: VarKind) -> Optional[np.ndarray]:
            cols = self.columns_of(kind)
            return values[cols] if cols else None

        s = gather(VarKind.S)
        return ModelPoint(
            x=gather(VarKind.X),
            y=gather(VarKind.Y),
            z=gather(VarKind.Z) if self.owns(VarKind.Z) else np.zeros(inst.m),
            s=s.reshape(inst.m, inst.n) if s is not None else None,
            theta_prime=gather(VarKind.THETA_PRIME),
            theta=gather(VarKind.THETA),
        )

    def objective_value(self, values: np.ndarray) -> float:
        cost = np.asarray([column.cost for column in self.columns])
        return float(cost @ np.asarray(values, dtype=float)) + self.offset

    def dump_lp_text(self) -> str:
        """One line per row, `name: coeffs sense rhs`; debugging aid only."""
        names = [str(column.ref) for column in self.columns]

        def linear(pairs) -> str:
            parts = [f"{'-' if v < 0 else '+'} {abs(v):g} {names[c]}" for c, v in pairs if v != 0]
            text = " ".join(parts) if parts else "0"
            return text[2:] if text.startswith("+ ") else text

        lines = [f"min: {linear(enumerate(column.cost for column in self.columns))}"]
        if self.offset:
            lines[0] += f" {'-' if self.offset < 0 else '+'} {abs(self.offset):g}"
        for r, row in enumerate(self.rows):
            lines.append(f"{row.name or f'r{r}'}: {linear(zip(row.indices, row.values))} {row.sense.value} {row.rhs:g}")
        for column in self.columns:
            kind = "bin" if column.binary else "cont"
            lines.append(f"bound {column.ref}: {column.lower:g} <= {column.ref} <= {column.upper:g} {kind}")
        return "\n".join(lines) + "\n"


def _first_stage(inst: Instance, stats: DemandStats) -> tuple[list[Column], dict[VarRef, int]]:
    columns = [Column(ref=VarRef.x(i), upper=1.0, cost=inst.f[i], binary=True) for i in range(inst.n)]
    columns += [Column(ref=VarRef.y(i), cost=inst.c[i]) for i in range(inst.n)]
    columns += [Column(ref=VarRef.z(j), upper=1.0, binary=True) for j in range(inst.m)]
    return columns, {column.ref: p for p, column in enumerate(columns)}


def _chance_rows(inst: Instance, stats: DemandStats, index: dict[VarRef, int]) -> list[Row]:
    """Cumulative demand rows, the cardinality row and the setup rows."""
    rows = []
    for j in range(inst.m):
        for t in range(inst.n):
            demand = stats.cum(j, t)
            terms = [(index[VarRef.y(i)], 1.0) for i in range(t + 1)]
            terms.append((index[VarRef.z(j)], demand))
            rows.append(make_row(terms, ConstraintSense.GE, demand, f"demand[{j},{t}]"))
    rows.append(make_row([(index[VarRef.z(j)], 1.0) for j in range(inst.m)], ConstraintSense.LE, stats.k, "budget"))
    rows.extend(_setup_rows(inst, stats, index))
    return rows


def _setup_rows(inst: Instance, stats: DemandStats, index: dict[VarRef, int]) -> list[Row]:
    return [
        make_row([(index[VarRef.y(i)], 1.0), (index[VarRef.x(i)], -float(stats.M[i]))], ConstraintSense.LE, 0.0, f"setup[{i}]")
        for i in range(inst.n)
    ]


def _assemble(formulation: Formulation, inst: Instance, stats: DemandStats, columns: list[Column], rows: list[Row], offset: float = 0.0) -> MipModel:
    model = MipModel(formulation=formulation, instance=inst, stats=stats, columns=tuple(columns), rows=tuple(rows), offset=offset)
    logger.debug("Built %s model: %d rows, %d columns", formulation.value, model.num_rows, model.num_cols)
    return model


def build_dep(inst: Instance, stats: Optional[DemandStats] = None) -> MipModel:
    """
    Deterministic equivalent: 2n + m + nm columns, 2nm + n + 1 rows.
    """
    stats = stats or demand_stats(inst)
    columns, index = _first_stage(inst, stats)
    for j in range(inst.m):
        for t in range(inst.n):
            ref = VarRef.s(j, t)
            index[ref] = len(columns)
            columns.append(Column(ref=ref, cost=inst.h[t] / inst.m))
    rows = _chance_rows(inst, stats, index)
    for j in range(inst.m):
        for t in range(inst.n):
            terms = [(index[VarRef.s(j, t)], 1.0)] + [(index[VarRef.y(i)], -1.0) for i in range(t + 1)]
            rows.append(make_row(terms, ConstraintSense.GE, -stats.cum(j, t), f"inventory[{j},{t}]"))
    return _assemble(Formulation.DEP, inst, stats, columns, rows)


def build_compact(inst: Instance, stats: Optional[DemandStats] = None) -> MipModel:
    """
    Compact reformulation: Theta'_i >= (m - q) * sum_{p<=i} y_p minus the m - q
    smallest cumulative demands of period i, for q = 0..k.
    """
    stats = stats or demand_stats(inst)
    columns, index = _first_stage(inst, stats)
    for i in range(inst.n):
        ref = VarRef.theta_prime(i)
        index[ref] = len(columns)
        columns.append(Column(ref=ref, cost=inst.h[i] / inst.m))
    rows = _chance_rows(inst, stats, index)
    for i in range(inst.n):
        ascending = stats.D[stats.sigma_asc[i], i]
        for q in range(stats.k + 1):
            count = inst.m - q
            terms = [(index[VarRef.theta_prime(i)], 1.0)] + [(index[VarRef.y(p)], -float(count)) for p in range(i + 1)]
            rows.append(make_row(terms, ConstraintSense.GE, -float(np.sum(ascending[:count])), f"envelope[{i},{q}]"))
    return _assemble(Formulation.COMPACT, inst, stats, columns, rows)


def build_benders_master(inst: Instance, stats: Optional[DemandStats] = None) -> MipModel:
    """
    Relaxed Benders master: first-stage rows plus theta_j >= 0, objective weight 1/m on theta.
    """
    stats = stats or demand_stats(inst)
    columns, index = _first_stage(inst, stats)
    for j in range(inst.m):
        ref = VarRef.theta(j)
        index[ref] = len(columns)
        columns.append(Column(ref=ref, cost=1.0 / inst.m))
    return _assemble(Formulation.BENDERS_MASTER, inst, stats, columns, _chance_rows(inst, stats, index))


def build_risk_free(inst: Instance, stats: Optional[DemandStats] = None) -> MipModel:
    """
    Risk-free model for k = 0: with every scenario enforced, s[j, t] equals the
    cumulative surplus, so inventory cost folds into the y costs plus a constant.
    """
    stats = stats or demand_stats(inst)
    if stats.k != 0:
        raise ValueError("risk-free model requires k = 0")
    h = np.asarray(inst.h, dtype=float)
    # y_i is held from period i to the end of the horizon
    carry = np.cumsum(h[::-1])[::-1]
    columns = [Column(ref=VarRef.x(i), upper=1.0, cost=inst.f[i], binary=True) for i in range(inst.n)]
    columns += [Column(ref=VarRef.y(i), cost=inst.c[i] + float(carry[i])) for i in range(inst.n)]
    index = {column.ref: p for p, column in enumerate(columns)}
    rows = []
    for t in range(inst.n):
        terms = [(index[VarRef.y(i)], 1.0) for i in range(t + 1)]
        rows.append(make_row(terms, ConstraintSense.GE, stats.top(t), f"demand[{t}]"))
    rows.extend(_setup_rows(inst, stats, index))
    offset = -float(h @ stats.D.sum(axis=0)) / inst.m
    return _assemble(Formulation.RISK_FREE, inst, stats, columns, rows, offset)


BUILDERS = {
    Formulation.DEP: build_dep,
    Formulation.COMPACT: build_compact,
    Formulation.BENDERS_MASTER: build_benders_master,
    Formulation.RISK_FREE: build_risk_free,
}


def build_model(inst: Instance, formulation: Formulation, stats: Optional[DemandStats] = None) -> MipModel:
    return BUILDERS[formulation](inst, stats)


def chance_feasible(
    inst: Instance,
    x: Sequence[float],
    y: Sequence[float],
    z: Sequence[float],
    tol: float = FEASIBILITY_TOL,
    stats: Optional[DemandStats] = None,
) -> bool:
    """
    True iff at most k scenarios are flagged violated, every y_i respects its
    setup and every unflagged scenario has its cumulative demand met.
    """
    stats = stats or demand_stats(inst)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if len(x) != inst.n or len(y) != inst.n or len(z) != inst.m:
        return False
    if float(np.sum(z)) > stats.k + tol:
        return False
    if np.any(y > stats.M * x + tol):
        return False
    cum_y = np.cumsum(y)
    for j in range(inst.m):
        if z[j] > tol:
            continue
        if np.any(cum_y < stats.D[j] - tol):
            return False
    return True


def theta_prime_envelope(stats: DemandStats, i: int, cum_y: float) -> float:
    """
    Smallest Theta'_i allowed by the supporting lines of period i at cumulative
    production `cum_y` (never below 0).
    """
    ascending = stats.D[stats.sigma_asc[i], i]
    best = 0.0
    for q in range(stats.k + 1):
        count = stats.m - q
        best = max(best, count * cum_y - float(np.sum(ascending[:count])))
    return best


def total_inventory(stats: DemandStats, i: int, cum_y: float) -> float:
    """Sum over scenarios of the inventory left at period i."""
    return float(np.sum(np.maximum(cum_y - stats.D[:, i], 0.0)))


def short_scenarios(stats: DemandStats, i: int, cum_y: float) -> int:
    return int(np.sum(stats.D[:, i] > cum_y + 1e-12))


def is_integral(value: float, tol: float = FEASIBILITY_TOL) -> bool:
    return abs(value - round(value)) <= tol


def fractionality(value: float) -> float:
    return abs(value - math.floor(value + 0.5))
