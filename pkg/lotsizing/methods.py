"""
Solution methods shared by the CLI, the bench harness and the service.
"""

import logging
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .benders import BendersDecomposition
from .cuts.models import CutFamily
from .cuts.pool import CutPool
from .formulations import Formulation, build_model
from .instance import Instance, demand_stats
from .lp.interfaces import LpEngine
from .solver import CutConfig, SolveReport, SolveStatus, root_gap, solve

logger = logging.getLogger(__name__)


class Method(str, Enum):
    DEP = "dep"
    COMPACT = "compact"
    BENDERS = "benders"
    RISK_FREE = "risk-free"


_FORMULATIONS = {
    Method.DEP: Formulation.DEP,
    Method.COMPACT: Formulation.COMPACT,
    Method.RISK_FREE: Formulation.RISK_FREE,
}


class MethodRun(BaseModel):
    """A finished run plus the artifacts the CLI can write out."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    report: SolveReport
    pool: Optional[CutPool] = None
    benders: Optional[BendersDecomposition] = None


def effective_cuts(method: Method, cfg: CutConfig) -> CutConfig:
    """Drop stock cuts for methods without inventory variables."""
    if cfg.stock and method != Method.DEP:
        logger.warning("Stock cuts are only separated with the dep method; ignoring them for %s", method.value)
        return cfg.model_copy(update={"stock": False})
    return cfg


def run_method(
    inst: Instance,
    method: Method,
    cfg: Optional[CutConfig] = None,
    time_limit: float = 600.0,
    engine: Optional[LpEngine] = None,
) -> MethodRun:
    cfg = effective_cuts(method, cfg or CutConfig())
    if method == Method.BENDERS:
        decomposition = BendersDecomposition(inst, cfg, time_limit, engine)
        return MethodRun(report=decomposition.run(), benders=decomposition)
    model = build_model(inst, _FORMULATIONS[method], demand_stats(inst))
    pool = CutPool()
    report = solve(model, cfg, time_limit, engine=engine, pool=pool)
    logger.info("%s finished: %s, objective %s, %d nodes, %.2fs", method.value, report.status.value, report.objective, report.nodes, report.time_sec)
    return MethodRun(report=report, pool=pool)


class RootGapPair(BaseModel):
    """Root gaps of a mixing-only run and of a mixing+new run started from its pool."""

    objective: Optional[float] = Field(default=None, description="Mixing-only optimum both gaps are measured against")
    paired_objective: Optional[float] = None
    mixing_root_lp: Optional[float] = None
    paired_root_lp: Optional[float] = None
    mixing_gap_pct: float = 0.0
    paired_gap_pct: float = 0.0
    mixing_cuts: int = 0
    new_cuts: int = 0
    both_optimal: bool = False


def paired_root_gaps(
    inst: Instance,
    method: Method = Method.DEP,
    time_limit: float = 600.0,
    engine: Optional[LpEngine] = None,
    mixing_limit: int = 150,
) -> RootGapPair:
    """
    Solve `inst` with mixing cuts only, then again with mixing and new cuts
    starting from the first run's mixing pool, and compare the two root gaps.
    """
    if method not in (Method.DEP, Method.COMPACT):
        raise ValueError(f"paired root gaps need a branch-and-cut method with z variables, not {method.value}")
    stats = demand_stats(inst)
    pool = CutPool()
    mixing = solve(build_model(inst, _FORMULATIONS[method], stats), CutConfig.from_names("mixing", mixing_limit=mixing_limit), time_limit, engine=engine, pool=pool)
    shared = [cut for cut in pool.cuts if cut.family == CutFamily.MIXING]
    paired = solve(
        build_model(inst, _FORMULATIONS[method], stats),
        CutConfig.from_names("mixing,new", mixing_limit=mixing_limit),
        time_limit,
        initial_cuts=shared,
        engine=engine,
    )
    pair = RootGapPair(
        objective=mixing.objective,
        paired_objective=paired.objective,
        mixing_root_lp=mixing.root_lp,
        paired_root_lp=paired.root_lp,
        mixing_gap_pct=root_gap(mixing),
        paired_gap_pct=root_gap(paired.model_copy(update={"objective": mixing.objective})),
        mixing_cuts=len(shared),
        new_cuts=paired.cuts.get(CutFamily.NEW.value, 0),
        both_optimal=mixing.status == SolveStatus.OPTIMAL and paired.status == SolveStatus.OPTIMAL,
    )
    logger.info("Root gap %.4f%% with mixing, %.4f%% with mixing+new (%d new cuts)", pair.mixing_gap_pct, pair.paired_gap_pct, pair.new_cuts)
    return pair
