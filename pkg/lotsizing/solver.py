"""
Branch-and-cut driver.

The root LP is tightened by rounds of separation (mixing, then hybrid, then
stock, then (l, S) big-M cuts) until no family finds a violated cut, a round
cap is hit or the bound tails off. Branch-and-bound then explores nodes in
best-bound order, branching on the most fractional binary.
"""

import heapq
import itertools
import logging
import math
import time
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .cuts.models import Cut, CutFamily
from .cuts.pool import CutPool
from .cuts.separation import separate_ls_bigm, separate_mixing, separate_new, separate_stock
from .errors import NumericalFailureError
from .formulations import MipModel, VarKind, chance_feasible, fractionality
from .lp.engine_factory import get_lp_engine
from .lp.interfaces import LpEngine
from .lp.models import Basis, LinearProgram, LpSolution, LpStatus

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
PRUNE_TOL = 1e-9
TAILING_OFF_TOL = 1e-7
TAILING_OFF_ROUNDS = 3

SEPARATION_ORDER = (CutFamily.MIXING, CutFamily.NEW, CutFamily.STOCK, CutFamily.LS_BIGM)


class CutConfig(BaseModel):
    """Which cut families the solver separates, and how often."""

    model_config = ConfigDict(frozen=True)

    mixing: bool = True
    new: bool = False
    stock: bool = False
    ls: bool = False
    mixing_limit: int = Field(150, ge=0, description="Cap on mixing cuts over the whole solve")
    new_root_only: bool = Field(True, description="Separate hybrid cuts at the root only")
    max_rounds: int = Field(50, ge=0, description="Separation rounds at the root")
    node_rounds: int = Field(0, ge=0, description="Separation rounds at every other node")

    @classmethod
    def from_names(cls, names: str, **kwargs) -> "CutConfig":
        """Parse a comma separated family list such as "mixing,new"."""
        chosen = [name.strip().lower() for name in names.split(",") if name.strip()]
        known = {CutFamily.MIXING.value, CutFamily.NEW.value, CutFamily.STOCK.value, CutFamily.LS_BIGM.value}
        for name in chosen:
            if name not in known:
                raise ValueError(f"unknown cut family {name!r}; expected one of {', '.join(sorted(known))}")
        return cls(**{family: family in chosen for family in known}, **kwargs)

    @classmethod
    def disabled(cls, **kwargs) -> "CutConfig":
        return cls(mixing=False, new=False, stock=False, ls=False, **kwargs)

    def enabled(self, family: CutFamily) -> bool:
        return bool(getattr(self, family.value, False))

    def names(self) -> str:
        return ",".join(family.value for family in SEPARATION_ORDER if self.enabled(family))


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    TIME_LIMIT = "time-limit"
    INFEASIBLE = "infeasible"


class Incumbent(BaseModel):
    """Best integer solution, split by variable kind."""

    x: list[float]
    y: list[float]
    z: list[float]
    s: Optional[list[list[float]]] = None
    theta_prime: Optional[list[float]] = None
    theta: Optional[list[float]] = None


class SolveReport(BaseModel):
    status: SolveStatus
    objective: Optional[float] = Field(default=None, description="Best integer objective")
    bound: Optional[float] = Field(default=None, description="Best proven lower bound")
    nodes: int = Field(0, description="Branch-and-bound nodes beyond the root")
    root_lp: Optional[float] = Field(default=None, description="Root LP value after cuts")
    root_lp_initial: Optional[float] = Field(default=None, description="Root LP value before cuts")
    root_gap_pct: Optional[float] = None
    cuts: dict[str, int] = Field(default_factory=dict)
    time_sec: float = 0.0
    formulation: str = ""
    cut_rounds: int = 0
    lp_iterations: int = 0
    benders_iterations: int = 0
    incumbent: Optional[Incumbent] = None

    @field_validator("objective", "bound", "root_lp", "root_lp_initial", "root_gap_pct")
    @classmethod
    def _finite_or_none(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not math.isfinite(v):
            return None
        return v

    @property
    def gap_pct(self) -> Optional[float]:
        """Final optimality gap in percent."""
        if self.objective is None or self.bound is None:
            return None
        if abs(self.objective) < 1e-12:
            return 0.0
        return max(0.0, 100.0 * (self.objective - self.bound) / abs(self.objective))

    def to_json_dict(self) -> dict:
        """The report JSON document."""
        return {
            "status": self.status.value,
            "objective": self.objective,
            "bound": self.bound,
            "nodes": self.nodes,
            "root_lp": self.root_lp,
            "root_gap_pct": self.root_gap_pct,
            "cuts": dict(self.cuts),
            "time_sec": self.time_sec,
        }


def root_gap(report: SolveReport) -> float:
    """100 * (best - root LP) / best; 0 when best is 0 or either value is missing."""
    return _gap(report.objective, report.root_lp)


def _gap(best: Optional[float], root: Optional[float]) -> float:
    if best is None or root is None or abs(best) < 1e-12:
        return 0.0
    return 100.0 * (best - root) / best


class _Node:
    __slots__ = ("bound", "fixings", "basis", "depth")

    def __init__(self, bound: float, fixings: tuple[tuple[int, float], ...], basis: Optional[Basis], depth: int):
        self.bound = bound
        self.fixings = fixings
        self.basis = basis
        self.depth = depth


class BranchAndCut:
    """
    One branch-and-cut solve of a MipModel. Single use: call run() once.
    """

    def __init__(
        self,
        model: MipModel,
        cfg: Optional[CutConfig] = None,
        time_limit: float = 600.0,
        initial_cuts: Sequence[Cut] = (),
        engine: Optional[LpEngine] = None,
        pool: Optional[CutPool] = None,
    ):
        self.model = model
        self.cfg = cfg or CutConfig()
        self.time_limit = time_limit
        self.engine = engine or get_lp_engine()
        self.pool = pool if pool is not None else CutPool()
        self.initial_cuts = list(initial_cuts)
        self.stats = model.stats
        self.lp: LinearProgram = model.to_lp()
        self.binaries = model.binary_columns()
        self.y_cols = model.columns_of(VarKind.Y)
        self.x_cols = model.columns_of(VarKind.X)
        self.z_cols = model.columns_of(VarKind.Z)
        self.best_value = math.inf
        self.best_values: Optional[np.ndarray] = None
        self.lp_iterations = 0
        self.cut_rounds = 0
        self._start = 0.0
        self._stock_warned = False

    def _elapsed(self) -> float:
        return time.perf_counter() - self._start

    def _out_of_time(self) -> bool:
        return self._elapsed() > self.time_limit

    def _track(self, solution: LpSolution) -> LpSolution:
        self.lp_iterations += solution.iterations
        if solution.status == LpStatus.UNBOUNDED:
            raise NumericalFailureError("LP relaxation reported unbounded")
        return solution

    def _separate(self, solution: LpSolution, at_root: bool) -> list[Cut]:
        point = self.model.point(solution.x)
        found: list[Cut] = []
        for family in SEPARATION_ORDER:
            if not self.cfg.enabled(family):
                continue
            if family == CutFamily.MIXING:
                room = self.cfg.mixing_limit - self.pool.count(CutFamily.MIXING)
                if room > 0:
                    found.extend(separate_mixing(self.stats, point)[:room])
            elif family == CutFamily.NEW:
                if at_root or not self.cfg.new_root_only:
                    found.extend(separate_new(self.stats, point))
            elif family == CutFamily.STOCK:
                if not self.model.owns(VarKind.S):
                    if not self._stock_warned:
                        logger.warning("Stock cuts need inventory variables; skipping them on the %s model", self.model.formulation.value)
                        self._stock_warned = True
                    continue
                found.extend(separate_stock(self.stats, point))
            elif family == CutFamily.LS_BIGM:
                found.extend(separate_ls_bigm(self.stats, point))
        accepted = []
        for cut in found:
            if self.pool.add(cut, cut.violation(point)):
                accepted.append(cut)
        return accepted

    def _cut_loop(self, lp: LinearProgram, solution: LpSolution, rounds: int, at_root: bool) -> LpSolution:
        history = [solution.objective]
        for _ in range(rounds):
            if self._out_of_time():
                break
            cuts = self._separate(solution, at_root)
            if not cuts:
                break
            rows = [self.model.cut_row(cut) for cut in cuts]
            if lp is not self.lp:
                for row in rows:
                    self.lp.add_row(row)
            solution = self._track(self.engine.add_rows_and_resolve(lp, solution, rows))
            if at_root:
                self.cut_rounds += 1
            logger.debug("Cut round added %d cuts, bound %.6f", len(cuts), solution.objective if solution.is_optimal else math.nan)
            if not solution.is_optimal:
                break
            history.append(solution.objective)
            if len(history) > TAILING_OFF_ROUNDS:
                base = history[-1 - TAILING_OFF_ROUNDS]
                if history[-1] - base < TAILING_OFF_TOL * max(1.0, abs(base)):
                    break
        return solution

    def _node_lp(self, fixings: tuple[tuple[int, float], ...]) -> LinearProgram:
        lp = self.lp.copy()
        for column, value in fixings:
            lp.set_bounds(column, value, value)
        return lp

    def _most_fractional(self, x: np.ndarray) -> Optional[int]:
        best, choice = INTEGRALITY_TOL, None
        for column in self.binaries:
            frac = fractionality(float(x[column]))
            if frac > best:
                best, choice = frac, column
        return choice

    def _unfixed_binary(self, x: np.ndarray, fixings: tuple[tuple[int, float], ...]) -> Optional[int]:
        """Most fractional binary not yet fixed at this node, however small its fractionality."""
        fixed = {column for column, _ in fixings}
        free = [column for column in self.binaries if column not in fixed]
        if not free:
            return None
        return max(free, key=lambda column: fractionality(float(x[column])))

    def _try_incumbent(self, lp: LinearProgram, solution: LpSolution) -> bool:
        """
        Fix binaries to their rounded values, re-solve, clip y and verify.
        False when the rounded candidate is rejected and the node needs branching.
        """
        fixed = lp.copy()
        for column in self.binaries:
            value = float(round(solution.x[column]))
            fixed.set_bounds(column, value, value)
        result = self._track(self.engine.solve(fixed, solution.basis))
        if not result.is_optimal:
            logger.warning("Rounded binaries of an integral node give a %s LP", result.status.value)
            return False
        values = result.x.copy()
        for column in self.binaries:
            values[column] = float(round(values[column]))
        for p, column in enumerate(self.y_cols):
            cap = float(self.stats.M[p]) * values[self.x_cols[p]]
            values[column] = min(max(values[column], 0.0), cap)
        inst = self.model.instance
        z = values[self.z_cols] if self.z_cols else np.zeros(inst.m)
        if not chance_feasible(inst, values[self.x_cols], values[self.y_cols], z, stats=self.stats):
            logger.warning("Rejected candidate incumbent failing the chance constraint")
            return False
        value = self.model.objective_value(values)
        if value < self.best_value - PRUNE_TOL * max(1.0, abs(value)):
            self.best_value = value
            self.best_values = values
            logger.debug("New incumbent %.6f", value)
        return True

    def _pruned(self, bound: float) -> bool:
        if self.best_values is None:
            return False
        return bound >= self.best_value - PRUNE_TOL * max(1.0, abs(self.best_value))

    def _incumbent(self) -> Optional[Incumbent]:
        if self.best_values is None:
            return None
        point = self.model.point(self.best_values)

        def listed(array):
            return None if array is None else array.tolist()

        return Incumbent(
            x=point.x.tolist(),
            y=point.y.tolist(),
            z=point.z.tolist(),
            s=listed(point.s),
            theta_prime=listed(point.theta_prime),
            theta=listed(point.theta),
        )

    def _report(self, status: SolveStatus, bound: Optional[float], nodes: int, root_lp: Optional[float], root_initial: Optional[float]) -> SolveReport:
        objective = self.best_value if self.best_values is not None else None
        if status == SolveStatus.OPTIMAL:
            bound = objective
        report = SolveReport(
            status=status,
            objective=objective,
            bound=bound,
            nodes=nodes,
            root_lp=root_lp,
            root_lp_initial=root_initial,
            root_gap_pct=_gap(objective, root_lp),
            cuts=self.pool.counts(),
            time_sec=self._elapsed(),
            formulation=self.model.formulation.value,
            cut_rounds=self.cut_rounds,
            lp_iterations=self.lp_iterations,
            incumbent=self._incumbent(),
        )
        logger.info(
            "%s %s: objective %s, bound %s, %d nodes, %.2fs",
            self.model.formulation.value,
            status.value,
            "-" if report.objective is None else f"{report.objective:.6f}",
            "-" if report.bound is None else f"{report.bound:.6f}",
            nodes,
            report.time_sec,
        )
        return report

    def run(self) -> SolveReport:
        self._start = time.perf_counter()
        offset = self.model.offset
        for cut in self.initial_cuts:
            if self.pool.add(cut):
                self.lp.add_row(self.model.cut_row(cut))

        root = self._track(self.engine.solve(self.lp))
        if root.status == LpStatus.INFEASIBLE:
            return self._report(SolveStatus.INFEASIBLE, None, 0, None, None)
        root_initial = root.objective + offset
        root = self._cut_loop(self.lp, root, self.cfg.max_rounds, at_root=True)
        if not root.is_optimal:
            return self._report(SolveStatus.INFEASIBLE, None, 0, None, root_initial)
        root_lp = root.objective + offset
        logger.info("Root LP %.6f -> %.6f after %d cut rounds (%d cuts)", root_initial, root_lp, self.cut_rounds, len(self.pool))

        counter = itertools.count()
        heap: list[tuple[float, int, _Node, Optional[LpSolution]]] = []
        heapq.heappush(heap, (root.objective, next(counter), _Node(root.objective, (), root.basis, 0), root))
        nodes = -1
        while heap:
            if self._out_of_time():
                logger.warning("Time limit of %.1fs reached with %d open nodes", self.time_limit, len(heap))
                bound = min(entry[0] for entry in heap) + offset
                if self.best_values is not None:
                    bound = min(bound, self.best_value)
                return self._report(SolveStatus.TIME_LIMIT, bound, max(nodes, 0), root_lp, root_initial)
            bound, _, node, solution = heapq.heappop(heap)
            nodes += 1
            if self._pruned(bound + offset):
                continue
            lp = self.lp if not node.fixings else self._node_lp(node.fixings)
            if solution is None:
                solution = self._track(self.engine.solve(lp, node.basis))
                if solution.is_optimal and self.cfg.node_rounds:
                    solution = self._cut_loop(lp, solution, self.cfg.node_rounds, at_root=False)
            if not solution.is_optimal or self._pruned(solution.objective + offset):
                continue
            column = self._most_fractional(solution.x)
            if column is None:
                if self._try_incumbent(lp, solution):
                    continue
                column = self._unfixed_binary(solution.x, node.fixings)
                if column is None:
                    logger.warning("Dropping node %d: every binary is fixed and its candidate was rejected", nodes)
                    continue
            logger.debug("Node %d depth %d bound %.6f branches on column %d", nodes, node.depth, solution.objective, column)
            for value in (0.0, 1.0):
                child = _Node(solution.objective, node.fixings + ((column, value),), solution.basis, node.depth + 1)
                heapq.heappush(heap, (solution.objective, next(counter), child, None))

        if self.best_values is None:
            return self._report(SolveStatus.INFEASIBLE, None, max(nodes, 0), root_lp, root_initial)
        return self._report(SolveStatus.OPTIMAL, self.best_value, max(nodes, 0), root_lp, root_initial)


def solve(
    model: MipModel,
    cfg: Optional[CutConfig] = None,
    time_limit: float = 600.0,
    *,
    initial_cuts: Sequence[Cut] = (),
    engine: Optional[LpEngine] = None,
    pool: Optional[CutPool] = None,
) -> SolveReport:
    """
    Solve `model` to optimality (or until `time_limit` seconds) with the root
    cuts enabled in `cfg`. `initial_cuts` are added to the root LP before the
    first solve.
    """
    return BranchAndCut(model, cfg, time_limit, initial_cuts, engine, pool).run()
