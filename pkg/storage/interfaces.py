"""
Storage interfaces for recorded solve runs.
"""

from abc import ABC, abstractmethod
from typing import Optional, Sequence

from lotsizing.instance import Instance, instance_id
from lotsizing.solver import SolveReport

from .models.solve_run import SolveRun


class RunStoreInterface(ABC):
    """
    Abstract interface for a solve-run storage backend.
    """

    @abstractmethod
    def record_run(self, run: SolveRun) -> SolveRun:
        """
        Persist a run and return it with its id assigned.
        """
        pass

    @abstractmethod
    def get_run(self, run_id: int) -> Optional[SolveRun]:
        """
        Get a run by its id.
        """
        pass

    @abstractmethod
    def list_runs(
        self,
        limit: int = 100,
        offset: int = 0,
        method: Optional[str] = None,
        status: Optional[str] = None,
    ) -> Sequence[SolveRun]:
        """
        List runs, newest first, with optional filtering.
        """
        pass

    @abstractmethod
    def count_runs(self, method: Optional[str] = None, status: Optional[str] = None) -> int:
        """
        Count runs matching filter criteria.
        """
        pass

    @abstractmethod
    def close(self) -> None:
        """
        Close connections and clean up resources.
        """
        pass


def solve_run_from_report(inst: Instance, method: str, cuts: str, report: SolveReport) -> SolveRun:
    """Flatten a report into a SolveRun row (not yet stored)."""
    payload = report.to_json_dict()
    return SolveRun(
        instance_id=instance_id(inst),
        n=inst.n,
        m=inst.m,
        epsilon=inst.epsilon,
        k=inst.k,
        method=method,
        cuts=cuts,
        status=report.status.value,
        objective=report.objective,
        bound=report.bound,
        nodes=report.nodes,
        root_lp=report.root_lp,
        root_gap_pct=report.root_gap_pct,
        time_sec=report.time_sec,
        cut_counts=dict(report.cuts),
        report=payload,
    )
