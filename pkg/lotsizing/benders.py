"""
Benders decomposition with closed-form scenario duals.

Each scenario subproblem is a simple-recourse LP whose optimal dual sets
gamma_i = h_i exactly where the cumulative surplus of period i is positive,
so subproblems are solved by a single pass over the horizon. The master is
re-solved to optimality with the branch-and-cut driver after each batch of
optimality cuts.
"""

import logging
import time
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from .cuts.models import Cut, CutFamily, CutProvenance
from .formulations import VarRef, build_benders_master
from .instance import Instance, demand_stats
from .lp.interfaces import LpEngine
from .lp.models import INF, ConstraintSense, LinearProgram, make_row
from .solver import CutConfig, SolveReport, SolveStatus, root_gap, solve

logger = logging.getLogger(__name__)

THETA_TOL = 1e-6

TRACE_COLUMNS = ["iter", "master_obj", "violated_scenarios", "cuts_added"]


class DualSolution(BaseModel):
    """Optimal dual of one scenario subproblem at a given production plan."""

    model_config = ConfigDict(frozen=True)

    scenario: int
    gamma: tuple[float, ...]
    value: float
    cumulative_demand: tuple[float, ...]


class IterationRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    iteration: int
    master_obj: Optional[float]
    violated_scenarios: int
    cuts_added: int


def _surplus(inst: Instance, j: int, yhat: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    cumulative = np.cumsum(np.asarray(inst.d[j], dtype=float))
    return np.cumsum(np.asarray(yhat, dtype=float)) - cumulative, cumulative


def subproblem_dual(inst: Instance, j: int, yhat: Sequence[float]) -> DualSolution:
    """gamma_i = h_i where the surplus of period i is positive, 0 otherwise (ties give 0)."""
    surplus, cumulative = _surplus(inst, j, yhat)
    h = np.asarray(inst.h, dtype=float)
    gamma = np.where(surplus > 0.0, h, 0.0)
    return DualSolution(
        scenario=j,
        gamma=tuple(gamma.tolist()),
        value=float(gamma @ surplus),
        cumulative_demand=tuple(cumulative.tolist()),
    )


def primal_inventory_cost(inst: Instance, j: int, yhat: Sequence[float]) -> float:
    """sum_i h_i * max(surplus_i, 0), evaluated directly."""
    surplus, _ = _surplus(inst, j, yhat)
    return float(np.asarray(inst.h, dtype=float) @ np.maximum(surplus, 0.0))


def subproblem_lp(inst: Instance, j: int, yhat: Sequence[float]) -> LinearProgram:
    """Primal recourse LP of scenario j: min h . s subject to s_i >= Y_i - D[j, i], s >= 0."""
    surplus, _ = _surplus(inst, j, yhat)
    lp = LinearProgram()
    for i in range(inst.n):
        lp.add_column(0.0, INF, float(inst.h[i]), f"s[{j},{i}]")
        lp.add_row(make_row([(i, 1.0)], ConstraintSense.GE, float(surplus[i]), f"inventory[{j},{i}]"))
    return lp


def optimality_cut(j: int, dual: DualSolution) -> Cut:
    """
    theta_j - sum_i gamma_i * (sum_{t<=i} y_t) >= -sum_i gamma_i * D[j, i].
    """
    gamma = np.asarray(dual.gamma, dtype=float)
    # y_t appears in every period i >= t
    tail = np.cumsum(gamma[::-1])[::-1]
    terms = [(VarRef.theta(j), 1.0)]
    terms += [(VarRef.y(t), -float(tail[t])) for t in range(len(gamma)) if tail[t] != 0.0]
    rhs = -float(gamma @ np.asarray(dual.cumulative_demand, dtype=float))
    return Cut(terms=tuple(terms), rhs=rhs, family=CutFamily.BENDERS_OPT, provenance=CutProvenance(scenario=j))


def is_trivial(dual: DualSolution) -> bool:
    """A zero dual only restates theta_j >= 0."""
    return not any(dual.gamma)


class BendersDecomposition:
    """
    Iterative Benders loop over the relaxed master. Cuts are memoized by
    (scenario, gamma pattern) so no cut is ever added twice.
    """

    def __init__(self, inst: Instance, cut_cfg: Optional[CutConfig] = None, time_limit: float = 600.0, engine: Optional[LpEngine] = None):
        self.inst = inst
        self.stats = demand_stats(inst)
        self.master = build_benders_master(inst, self.stats)
        self.cut_cfg = cut_cfg or CutConfig()
        self.time_limit = time_limit
        self.engine = engine
        self.cuts: list[Cut] = []
        self.patterns: dict[int, set[tuple[float, ...]]] = {j: set() for j in range(inst.m)}
        self.trace: list[IterationRecord] = []

    def _master_values(self, report: SolveReport) -> tuple[np.ndarray, np.ndarray]:
        incumbent = report.incumbent
        return np.asarray(incumbent.y, dtype=float), np.asarray(incumbent.theta, dtype=float)

    def _true_objective(self, report: SolveReport) -> float:
        incumbent = report.incumbent
        first_stage = float(np.dot(self.inst.f, incumbent.x) + np.dot(self.inst.c, incumbent.y))
        recourse = sum(primal_inventory_cost(self.inst, j, incumbent.y) for j in range(self.inst.m))
        return first_stage + recourse / self.inst.m

    def run(self) -> SolveReport:
        start = time.perf_counter()
        iteration = 0
        nodes = 0
        lp_iterations = 0
        while True:
            iteration += 1
            remaining = self.time_limit - (time.perf_counter() - start)
            report = solve(self.master, self.cut_cfg, max(remaining, 0.0), initial_cuts=self.cuts, engine=self.engine)
            nodes += report.nodes
            lp_iterations += report.lp_iterations
            if report.status != SolveStatus.OPTIMAL:
                self.trace.append(IterationRecord(iteration=iteration, master_obj=report.objective, violated_scenarios=0, cuts_added=0))
                return self._finish(report, start, iteration, nodes, lp_iterations, converged=False)

            yhat, theta = self._master_values(report)
            violated = 0
            added = 0
            for j in range(self.inst.m):
                dual = subproblem_dual(self.inst, j, yhat)
                if is_trivial(dual):
                    continue
                if dual.value <= theta[j] + THETA_TOL * (1.0 + abs(dual.value)):
                    continue
                violated += 1
                if dual.gamma in self.patterns[j]:
                    logger.warning("Scenario %d repeats a memoized dual pattern; skipping its cut", j)
                    continue
                self.patterns[j].add(dual.gamma)
                self.cuts.append(optimality_cut(j, dual))
                added += 1
            self.trace.append(IterationRecord(iteration=iteration, master_obj=report.objective, violated_scenarios=violated, cuts_added=added))
            logger.info("Benders iteration %d: master %.6f, %d violated scenarios, %d cuts added", iteration, report.objective, violated, added)
            if added == 0:
                if violated:
                    logger.warning("Benders loop stalled: %d scenarios still violated but every cut is already in the master", violated)
                return self._finish(report, start, iteration, nodes, lp_iterations, converged=violated == 0)
            if time.perf_counter() - start > self.time_limit:
                logger.warning("Benders loop stopped by the time limit after %d iterations", iteration)
                return self._finish(report, start, iteration, nodes, lp_iterations, converged=False)

    def _finish(self, report: SolveReport, start: float, iteration: int, nodes: int, lp_iterations: int, converged: bool) -> SolveReport:
        update = {
            "nodes": nodes,
            "lp_iterations": lp_iterations,
            "benders_iterations": iteration,
            "time_sec": time.perf_counter() - start,
        }
        counts = dict(report.cuts)
        counts[CutFamily.BENDERS_OPT.value] = len(self.cuts)
        update["cuts"] = counts
        if report.incumbent is not None:
            update["objective"] = self._true_objective(report)
        if report.status == SolveStatus.OPTIMAL:
            if converged:
                update["bound"] = min(report.bound, update["objective"])
            else:
                # master optimum is only a lower bound while cuts are missing
                update["status"] = SolveStatus.TIME_LIMIT
                update["bound"] = report.objective
        result = report.model_copy(update=update)
        return result.model_copy(update={"root_gap_pct": root_gap(result)})

    def write_trace(self, path: Union[str, Path]) -> None:
        """Iteration trace CSV: iter,master_obj,violated_scenarios,cuts_added."""
        frame = pd.DataFrame(
            [[r.iteration, r.master_obj, r.violated_scenarios, r.cuts_added] for r in self.trace],
            columns=TRACE_COLUMNS,
        )
        frame.to_csv(path, index=False)


def solve_benders(inst: Instance, cut_cfg: Optional[CutConfig] = None, time_limit: float = 600.0, engine: Optional[LpEngine] = None) -> SolveReport:
    return BendersDecomposition(inst, cut_cfg, time_limit, engine).run()
