"""
Tests for lotsizing/solver.py and lotsizing/methods.py.

Tests cover:
- CutConfig parsing
- optimal objectives against the enumeration oracle
- agreement of DEP, compact, Benders and risk-free runs
- mixing limit, disabled cuts, stock cuts without inventory
- time limit handling and the report JSON
- root gap arithmetic
- rejected integral candidates are branched on rather than dropped
- an epsilon just below one
- paired root gaps of mixing and mixing+new runs sharing one mixing pool
"""

import logging

import pytest

from lotsizing import solver
from lotsizing.cuts.generators import all_uls_cuts
from lotsizing.formulations import build_compact, build_dep, build_risk_free, chance_feasible
from lotsizing.instance import demand_stats, generate
from lotsizing.methods import Method, effective_cuts, paired_root_gaps, run_method
from lotsizing.oracle import brute_force_optimum
from lotsizing.solver import CutConfig, SolveReport, SolveStatus, root_gap, solve


class TestCutConfig:
    """Test CutConfig.from_names()."""

    def test_names(self):
        """A comma separated list enables exactly those families."""
        cfg = CutConfig.from_names("mixing, new")
        assert cfg.mixing and cfg.new
        assert not cfg.stock and not cfg.ls
        assert cfg.names() == "mixing,new"

    def test_empty(self):
        """An empty list disables every family."""
        assert CutConfig.from_names("") == CutConfig.disabled()

    def test_unknown_family(self):
        """Unknown names raise ValueError."""
        with pytest.raises(ValueError) as exc_info:
            CutConfig.from_names("mixing,gomory")
        assert "unknown cut family 'gomory'" in str(exc_info.value)

    def test_mixing_limit_passthrough(self):
        """Keyword arguments reach the config."""
        assert CutConfig.from_names("mixing", mixing_limit=7).mixing_limit == 7


class TestSolveOptimum:
    """Branch-and-cut against the enumeration oracle."""

    def test_table_instance(self, table_instance):
        """DEP with mixing cuts reaches the brute-force optimum."""
        expected, _ = brute_force_optimum(table_instance)
        report = solve(build_dep(table_instance), CutConfig())
        assert report.status == SolveStatus.OPTIMAL
        assert report.objective == pytest.approx(expected, rel=1e-6)
        assert report.bound == report.objective

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_random_instances(self, make_instance, seed):
        """DEP without cuts and compact with every cut agree with enumeration."""
        inst = make_instance(n=3, m=4, epsilon=0.25, seed=seed)
        expected, _ = brute_force_optimum(inst)
        plain = solve(build_dep(inst), CutConfig.disabled())
        cut = solve(build_compact(inst), CutConfig.from_names("mixing,new,ls"))
        assert plain.objective == pytest.approx(expected, rel=1e-6)
        assert cut.objective == pytest.approx(expected, rel=1e-6)

    def test_incumbent_is_feasible(self, table_instance):
        """The reported plan passes the chance constraint."""
        report = solve(build_dep(table_instance), CutConfig.from_names("mixing,stock"))
        incumbent = report.incumbent
        assert incumbent is not None
        assert chance_feasible(table_instance, incumbent.x, incumbent.y, incumbent.z)
        assert len(incumbent.s) == table_instance.m

    def test_zero_risk_hull_at_root(self, make_instance):
        """With every (l, S) cut pre-added the k = 0 model solves without branching."""
        inst = make_instance(n=4, m=5, epsilon=0.0, seed=2)
        stats = demand_stats(inst)
        model = build_risk_free(inst, stats)
        report = solve(model, CutConfig.disabled(), initial_cuts=all_uls_cuts(stats))
        assert report.status == SolveStatus.OPTIMAL
        assert report.nodes == 0
        assert report.objective == pytest.approx(brute_force_optimum(inst)[0], rel=1e-6)

    def test_rejected_candidate_is_branched(self, table_instance, monkeypatch, caplog):
        """An integral node whose rounded plan fails the chance constraint still gets explored."""
        calls = []

        def reject_first(*args, **kwargs):
            calls.append(args)
            return len(calls) > 1 and chance_feasible(*args, **kwargs)

        monkeypatch.setattr(solver, "chance_feasible", reject_first)
        with caplog.at_level(logging.WARNING, logger="lotsizing.solver"):
            report = solve(build_dep(table_instance), CutConfig())
        assert len(calls) >= 2
        assert "Rejected candidate incumbent" in caplog.text
        assert report.status == SolveStatus.OPTIMAL
        assert report.objective == pytest.approx(brute_force_optimum(table_instance)[0], rel=1e-6)

    def test_epsilon_just_below_one(self):
        """Rounding never lets every scenario be violated."""
        report = run_method(generate(2, 1, 1 - 1e-10, 1), Method.COMPACT, CutConfig.from_names("mixing"))
        assert report.report.status == SolveStatus.OPTIMAL


class TestSolveCuts:
    """Cut handling inside the solver."""

    def test_mixing_limit(self, make_instance):
        """The mixing counter never exceeds the limit."""
        inst = make_instance(n=4, m=10, epsilon=0.3, seed=8)
        report = solve(build_dep(inst), CutConfig.from_names("mixing", mixing_limit=2))
        assert report.cuts["mixing"] <= 2

    def test_cuts_do_not_change_optimum(self, make_instance):
        """Cuts tighten the root but keep the optimum."""
        inst = make_instance(n=3, m=6, epsilon=0.34, seed=6)
        plain = solve(build_dep(inst), CutConfig.disabled())
        cut = solve(build_dep(inst), CutConfig.from_names("mixing,new,stock"))
        assert cut.objective == pytest.approx(plain.objective, rel=1e-6)
        assert cut.root_lp >= plain.root_lp - 1e-6
        assert sum(plain.cuts.values()) == 0

    def test_stock_skipped_without_inventory(self, table_instance, caplog):
        """Stock cuts on the compact model warn once and are skipped."""
        with caplog.at_level(logging.WARNING, logger="lotsizing.solver"):
            report = solve(build_compact(table_instance), CutConfig.from_names("stock"))
        assert report.cuts["stock"] == 0
        assert sum("Stock cuts need inventory variables" in record.message for record in caplog.records) == 1


class TestSolveLimits:
    """Time limit and report fields."""

    def test_time_limit(self, table_instance):
        """A zero time limit stops before any node and keeps a finite bound."""
        report = solve(build_dep(table_instance), CutConfig(), time_limit=0.0)
        assert report.status == SolveStatus.TIME_LIMIT
        assert report.objective is None
        assert report.bound is not None
        assert report.gap_pct is None

    def test_report_json(self, table_instance):
        """The report document carries the published keys only."""
        document = solve(build_compact(table_instance), CutConfig()).to_json_dict()
        assert list(document) == ["status", "objective", "bound", "nodes", "root_lp", "root_gap_pct", "cuts", "time_sec"]
        assert document["status"] == "optimal"
        assert set(document["cuts"]) == {"ls", "mixing", "new", "stock", "benders"}


class TestRootGap:
    """Test root_gap()."""

    def test_equal(self):
        """Root LP at the optimum gives 0%."""
        assert root_gap(SolveReport(status=SolveStatus.OPTIMAL, objective=50.0, root_lp=50.0)) == 0.0

    def test_ten_percent(self):
        """best 100, root 90 gives 10%."""
        assert root_gap(SolveReport(status=SolveStatus.OPTIMAL, objective=100.0, root_lp=90.0)) == pytest.approx(10.0)

    def test_zero_best(self):
        """A zero optimum defines the gap as 0."""
        assert root_gap(SolveReport(status=SolveStatus.OPTIMAL, objective=0.0, root_lp=-1.0)) == 0.0


class TestRunMethod:
    """Test run_method() and effective_cuts()."""

    def test_methods_agree(self, table_instance):
        """dep, compact and benders reach the same optimum."""
        objectives = [run_method(table_instance, method).report.objective for method in (Method.DEP, Method.COMPACT, Method.BENDERS)]
        assert objectives[1] == pytest.approx(objectives[0], rel=1e-6)
        assert objectives[2] == pytest.approx(objectives[0], rel=1e-6)

    def test_risk_free_matches_dep(self, make_instance):
        """At k = 0 the risk-free model has the DEP optimum."""
        inst = make_instance(n=3, m=4, epsilon=0.0, seed=9)
        risk_free = run_method(inst, Method.RISK_FREE).report.objective
        dep = run_method(inst, Method.DEP).report.objective
        assert risk_free == pytest.approx(dep, rel=1e-6)

    def test_artifacts(self, table_instance):
        """Pool for branch-and-cut runs, decomposition for Benders."""
        compact = run_method(table_instance, Method.COMPACT)
        benders = run_method(table_instance, Method.BENDERS)
        assert compact.pool is not None and compact.benders is None
        assert benders.benders is not None and benders.pool is None

    def test_stock_dropped_for_compact(self, caplog):
        """Stock cuts are switched off with a warning outside dep."""
        cfg = CutConfig.from_names("mixing,stock")
        with caplog.at_level(logging.WARNING, logger="lotsizing.methods"):
            assert not effective_cuts(Method.COMPACT, cfg).stock
        assert "only separated with the dep method" in caplog.text
        assert effective_cuts(Method.DEP, cfg).stock


class TestPairedRootGaps:
    """Test paired_root_gaps()."""

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_new_cuts_never_widen_root_gap(self, make_instance, seed):
        """Starting from the mixing pool, mixing+new closes at least as much of the gap."""
        pair = paired_root_gaps(make_instance(n=3, m=6, epsilon=0.34, seed=seed))
        assert pair.both_optimal
        assert pair.paired_objective == pytest.approx(pair.objective, rel=1e-6)
        assert pair.paired_root_lp >= pair.mixing_root_lp - 1e-6
        assert pair.paired_gap_pct <= pair.mixing_gap_pct + 1e-6

    def test_table_instance(self, table_instance):
        """The compact model pairs the same way."""
        pair = paired_root_gaps(table_instance, Method.COMPACT)
        assert pair.paired_root_lp >= pair.mixing_root_lp - 1e-6
        assert pair.paired_gap_pct <= pair.mixing_gap_pct + 1e-6

    def test_benders_rejected(self, table_instance):
        """Only branch-and-cut methods with z variables can be paired."""
        with pytest.raises(ValueError) as exc_info:
            paired_root_gaps(table_instance, Method.BENDERS)
        assert "benders" in str(exc_info.value)
