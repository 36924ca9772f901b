"""
Desk-scale benchmark harness.

A grid of (epsilon, n, m) cells is crossed with seeds, methods and cut
configurations; every run yields one BenchRow and the CSV holds the average
over seeds of each (cell, method, cuts) combination.
"""

import itertools
import json
import logging
from pathlib import Path
from typing import Callable, Optional, Union

import pandas as pd
from pydantic import BaseModel, Field, field_validator

from .cuts.models import CutFamily
from .errors import LotSizingError
from .instance import Instance, generate, instance_id
from .lp.interfaces import LpEngine
from .methods import Method, run_method
from .solver import CutConfig, SolveReport

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["eps", "n", "m", "method", "cuts", "time_sec", "gap_pct", "nodes", "root_gap_pct", "cuts_mixing", "cuts_new", "cuts_stock", "cuts_benders"]
_GROUP_KEYS = ["eps", "n", "m", "method", "cuts"]

RunHook = Callable[[Instance, Method, CutConfig, SolveReport], None]


class BenchGrid(BaseModel):
    eps: list[float]
    n: list[int]
    m: list[int]
    seeds: list[int] = Field(default_factory=lambda: [1, 2, 3])
    methods: list[Method] = Field(default_factory=lambda: [Method.DEP, Method.COMPACT])
    cuts: list[str] = Field(default_factory=lambda: ["mixing"])
    time_limit: float = Field(600.0, gt=0)

    @field_validator("cuts")
    @classmethod
    def _known_cut_names(cls, v: list[str]) -> list[str]:
        for names in v:
            CutConfig.from_names(names)
        return v


class BenchRow(BaseModel):
    """One solve of the grid, flattened for the CSV."""

    instance_id: str
    eps: float
    n: int
    m: int
    seed: int
    method: str
    cuts: str
    status: str = ""
    time_sec: Optional[float] = None
    gap_pct: Optional[float] = None
    nodes: Optional[int] = None
    root_gap_pct: Optional[float] = None
    cuts_mixing: int = 0
    cuts_new: int = 0
    cuts_stock: int = 0
    cuts_benders: int = 0
    error: Optional[str] = None

    @classmethod
    def from_report(cls, inst: Instance, seed: int, method: Method, cuts: str, report: SolveReport) -> "BenchRow":
        counts = report.cuts
        return cls(
            instance_id=instance_id(inst),
            eps=inst.epsilon,
            n=inst.n,
            m=inst.m,
            seed=seed,
            method=method.value,
            cuts=cuts,
            status=report.status.value,
            time_sec=report.time_sec,
            gap_pct=report.gap_pct,
            nodes=report.nodes,
            root_gap_pct=report.root_gap_pct,
            cuts_mixing=counts.get(CutFamily.MIXING.value, 0),
            cuts_new=counts.get(CutFamily.NEW.value, 0),
            cuts_stock=counts.get(CutFamily.STOCK.value, 0),
            cuts_benders=counts.get(CutFamily.BENDERS_OPT.value, 0),
        )


def load_grid(path: Union[str, Path]) -> BenchGrid:
    return BenchGrid.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))


def run_bench(grid: BenchGrid, engine: Optional[LpEngine] = None, on_run: Optional[RunHook] = None) -> list[BenchRow]:
    """
    Run every grid combination in grid order. A failing run is recorded with
    its error and the harness moves on.
    """
    rows = []
    for eps, n, m, seed in itertools.product(grid.eps, grid.n, grid.m, grid.seeds):
        inst = generate(n, m, eps, seed)
        for method, cuts in itertools.product(grid.methods, grid.cuts):
            cfg = CutConfig.from_names(cuts)
            try:
                report = run_method(inst, method, cfg, grid.time_limit, engine).report
            except (LotSizingError, ValueError) as exc:
                logger.warning("Bench run eps=%s n=%d m=%d seed=%d %s [%s] failed: %s", eps, n, m, seed, method.value, cuts, exc)
                rows.append(BenchRow(instance_id=instance_id(inst), eps=eps, n=n, m=m, seed=seed, method=method.value, cuts=cuts, status="error", error=str(exc)))
                continue
            if on_run is not None:
                on_run(inst, method, cfg, report)
            row = BenchRow.from_report(inst, seed, method, cuts, report)
            logger.info("Bench eps=%s n=%d m=%d seed=%d %s [%s]: %s in %.2fs", eps, n, m, seed, method.value, cuts, row.status, row.time_sec)
            rows.append(row)
    return rows


def average_rows(rows: list[BenchRow]) -> pd.DataFrame:
    """Per (eps, n, m, method, cuts) averages over seeds; failed runs are left out of the means."""
    if not rows:
        return pd.DataFrame(columns=BENCH_COLUMNS)
    frame = pd.DataFrame([row.model_dump() for row in rows])
    frame = frame[frame["error"].isna()].copy()
    if frame.empty:
        return pd.DataFrame(columns=BENCH_COLUMNS)
    numeric = [column for column in BENCH_COLUMNS if column not in _GROUP_KEYS]
    frame[numeric] = frame[numeric].apply(pd.to_numeric, errors="coerce")
    averaged = frame.groupby(_GROUP_KEYS, sort=False, as_index=False)[numeric].mean()
    return averaged[BENCH_COLUMNS]


def write_bench_csv(rows: list[BenchRow], path: Union[str, Path]) -> pd.DataFrame:
    frame = average_rows(rows)
    frame.to_csv(path, index=False)
    return frame
