"""
REST API router for generating instances, solving them and browsing runs.
"""

import logging
import os
from typing import List, Optional

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field

from lotsizing.errors import LotSizingError
from lotsizing.instance import Instance, generate
from lotsizing.methods import Method, run_method
from lotsizing.solver import CutConfig
from storage.interfaces import RunStoreInterface, solve_run_from_report
from storage.models import SolveRun

from ..run_store_factory import get_run_store

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/v1")


def max_time_limit() -> float:
    return float(os.getenv("LOTSIZING_API_MAX_TIME_LIMIT", "60"))


class GenerateRequest(BaseModel):
    n: int = Field(..., ge=1, le=200)
    m: int = Field(..., ge=1, le=5000)
    epsilon: float = Field(..., ge=0.0, lt=1.0)
    seed: int = 1


class SolveRequest(BaseModel):
    instance: Instance
    method: Method = Method.COMPACT
    cuts: str = Field("mixing", description="Comma separated cut families")
    mixing_limit: int = Field(150, ge=0)
    time_limit: float = Field(60.0, gt=0)


@router.post(
    "/instances/generate",
    response_model=Instance,
    summary="Generate a random instance",
)
async def generate_instance(request: GenerateRequest):
    """
    Draw an instance from the default discrete uniform generators.

    - **n**, **m**: periods and scenarios.
    - **epsilon**: risk level; k = floor(m * epsilon) scenarios may be violated.
    - **seed**: identical seeds give identical instances.
    """
    return generate(request.n, request.m, request.epsilon, request.seed)


@router.post(
    "/solve",
    response_model=SolveRun,
    summary="Solve an instance and record the run",
)
def solve_instance(request: SolveRequest, store: RunStoreInterface = Depends(get_run_store)):
    """
    Solve the posted instance with the chosen method and cut families. The
    time limit is capped by LOTSIZING_API_MAX_TIME_LIMIT.
    """
    time_limit = request.time_limit
    cap = max_time_limit()
    if time_limit > cap:
        logger.warning("Requested time limit %.1fs clamped to %.1fs", time_limit, cap)
        time_limit = cap
    try:
        cfg = CutConfig.from_names(request.cuts, mixing_limit=request.mixing_limit)
        report = run_method(request.instance, request.method, cfg, time_limit).report
    except (LotSizingError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return store.record_run(solve_run_from_report(request.instance, request.method.value, cfg.names(), report))


@router.get(
    "/runs",
    response_model=List[SolveRun],
    summary="List recorded runs",
)
async def list_runs(
    limit: int = 100,
    offset: int = 0,
    method: Optional[str] = None,
    status: Optional[str] = None,
    store: RunStoreInterface = Depends(get_run_store),
):
    """
    List recorded runs, newest first.

    - **limit**: Maximum number of runs to return.
    - **offset**: Number of runs to skip for pagination.
    - **method**, **status**: optional filters.
    """
    return store.list_runs(limit=limit, offset=offset, method=method, status=status)


@router.get(
    "/runs/{run_id}",
    response_model=SolveRun,
    summary="Get a single recorded run",
)
async def get_run(run_id: int, store: RunStoreInterface = Depends(get_run_store)):
    """
    Retrieve one run, including its full report document.
    """
    run = store.get_run(run_id)
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run
