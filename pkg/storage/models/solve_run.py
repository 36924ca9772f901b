# storage/models/solve_run.py

from datetime import datetime, timezone
from typing import Optional

from sqlalchemy import JSON
from sqlmodel import Column, Field, SQLModel


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class SolveRun(SQLModel, table=True):
    """
    One finished solve: the instance it ran on, the configuration and the
    headline numbers of its report.
    """

    __tablename__ = "solve_runs"

    id: Optional[int] = Field(default=None, primary_key=True)
    created_at: datetime = Field(default_factory=_utcnow, index=True)

    instance_id: str = Field(index=True, description="Content hash of the instance")
    n: int
    m: int
    epsilon: float
    k: int

    method: str = Field(index=True)
    cuts: str = Field(default="", description="Comma separated cut families")
    status: str = Field(index=True)

    objective: Optional[float] = None
    bound: Optional[float] = None
    nodes: int = 0
    root_lp: Optional[float] = None
    root_gap_pct: Optional[float] = None
    time_sec: float = 0.0

    cut_counts: dict = Field(default_factory=dict, sa_column=Column(JSON, nullable=False))
    report: dict = Field(default_factory=dict, sa_column=Column(JSON, nullable=False))
