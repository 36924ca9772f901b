"""
Tests for storage/backends/sqlite.py and storage/interfaces.py.

Tests cover:
- solve_run_from_report() flattening
- record_run(), get_run(), list_runs() and count_runs()
- filtering and newest-first ordering
- engine ownership on close
"""

import pytest

from lotsizing.solver import SolveReport, SolveStatus
from storage.backends.sqlite import SQLiteRunStore
from storage.interfaces import solve_run_from_report


@pytest.fixture
def optimal_report():
    """A finished report with a few cuts."""
    return SolveReport(
        status=SolveStatus.OPTIMAL,
        objective=120.0,
        bound=120.0,
        nodes=3,
        root_lp=108.0,
        root_gap_pct=10.0,
        cuts={"ls": 0, "mixing": 4, "new": 1, "stock": 0, "benders": 0},
        time_sec=0.5,
    )


class TestSolveRunFromReport:
    """Test solve_run_from_report()."""

    def test_fields(self, table_instance, optimal_report):
        """Instance sizes and report numbers are copied."""
        run = solve_run_from_report(table_instance, "dep", "mixing,new", optimal_report)
        assert (run.n, run.m, run.k) == (2, 5, 2)
        assert run.epsilon == 0.4
        assert run.status == "optimal"
        assert run.objective == 120.0
        assert run.cut_counts["mixing"] == 4
        assert run.report == optimal_report.to_json_dict()
        assert run.id is None

    def test_time_limit_run(self, table_instance):
        """A run without incumbent keeps objective None."""
        report = SolveReport(status=SolveStatus.TIME_LIMIT, bound=80.0)
        run = solve_run_from_report(table_instance, "compact", "", report)
        assert run.objective is None
        assert run.status == "time_limit"


class TestSQLiteRunStore:
    """Test SQLiteRunStore."""

    def test_record_and_get(self, in_memory_store, table_instance, optimal_report):
        """Recording assigns an id the run can be fetched by."""
        run = in_memory_store.record_run(solve_run_from_report(table_instance, "dep", "mixing", optimal_report))
        assert run.id is not None
        fetched = in_memory_store.get_run(run.id)
        assert fetched.method == "dep"
        assert fetched.report["objective"] == 120.0

    def test_get_missing(self, in_memory_store):
        """Unknown ids give None."""
        assert in_memory_store.get_run(999) is None

    def test_list_and_count(self, in_memory_store, table_instance, optimal_report):
        """Filters apply to both list and count; newest first."""
        for method in ("dep", "compact", "dep"):
            in_memory_store.record_run(solve_run_from_report(table_instance, method, "mixing", optimal_report))
        in_memory_store.record_run(solve_run_from_report(table_instance, "benders", "", SolveReport(status=SolveStatus.TIME_LIMIT)))

        assert in_memory_store.count_runs() == 4
        assert in_memory_store.count_runs(method="dep") == 2
        assert in_memory_store.count_runs(status="time_limit") == 1
        runs = in_memory_store.list_runs()
        assert [run.id for run in runs] == [4, 3, 2, 1]
        assert [run.method for run in in_memory_store.list_runs(method="dep")] == ["dep", "dep"]

    def test_pagination(self, in_memory_store, table_instance, optimal_report):
        """limit and offset page through the newest-first list."""
        for _ in range(5):
            in_memory_store.record_run(solve_run_from_report(table_instance, "dep", "mixing", optimal_report))
        page = in_memory_store.list_runs(limit=2, offset=1)
        assert [run.id for run in page] == [4, 3]


class TestEngineOwnership:
    """Test which stores dispose their engine on close()."""

    def test_owned_engine_disposed(self, tmp_path, monkeypatch):
        """A store built from a path disposes the engine it created."""
        store = SQLiteRunStore(str(tmp_path / "runs.db"))
        disposed = []
        monkeypatch.setattr(store.engine, "dispose", lambda *args, **kwargs: disposed.append(True))
        store.close()
        assert disposed == [True]

    def test_shared_engine_kept(self, in_memory_store, monkeypatch):
        """A store handed an engine leaves it open for the next store."""
        disposed = []
        monkeypatch.setattr(in_memory_store.engine, "dispose", lambda *args, **kwargs: disposed.append(True))
        shared = SQLiteRunStore(engine=in_memory_store.engine)
        shared.close()
        assert not disposed

    def test_needs_path_or_engine(self):
        """Neither a path nor an engine is a ValueError."""
        with pytest.raises(ValueError):
            SQLiteRunStore()
