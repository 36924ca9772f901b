"""
Tests for lotsizing/cuts generators, models and pool.

Tests cover:
- coefficients of every cut family on the two-period instance
- CutSpecError for broken parameters
- the dominating hybrid cut and its slack relation to the mixing cut
- the uncapacitated (l, S) family
- cut pool duplicate suppression, counters and the cut log CSV
"""

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from lotsizing.cuts.generators import (
    all_uls_cuts,
    dominance_holds,
    dominating_cut,
    ls_bigm_cut,
    mixing_coefficients,
    mixing_cut,
    new_cut,
    stock_cut,
    uls_cut,
)
from lotsizing.cuts.models import Cut, CutFamily, MixingSet, NewCutSpec
from lotsizing.cuts.pool import CUT_LOG_COLUMNS, CutPool
from lotsizing.errors import CutSpecError
from lotsizing.formulations import ModelPoint, VarRef
from lotsizing.instance import Instance, demand_stats


def coefficients(cut: Cut) -> dict[str, float]:
    return {str(ref): coef for ref, coef in cut.terms}


class TestLsBigM:
    """Test ls_bigm_cut()."""

    def test_partial_partition(self, table_stats):
        """j=2, ell=1, S={0}: y0 + 10 x1 + 11 z2 >= 11."""
        cut = ls_bigm_cut(table_stats, 2, 1, [0])
        assert coefficients(cut) == {"y[0]": 1.0, "x[1]": 10.0, "z[2]": 11.0}
        assert cut.rhs == 11.0
        assert cut.family == CutFamily.LS_BIGM

    def test_full_partition_is_demand_row(self, table_stats):
        """S = 0..ell reduces to the cumulative demand row."""
        cut = ls_bigm_cut(table_stats, 3, 1, [0, 1])
        assert coefficients(cut) == {"y[0]": 1.0, "y[1]": 1.0, "z[3]": 10.0}
        assert cut.rhs == 10.0

    def test_bad_subset(self, table_stats):
        """S may not reach past ell."""
        with pytest.raises(CutSpecError):
            ls_bigm_cut(table_stats, 0, 0, [1])


class TestMixing:
    """Test mixing_cut() and mixing_coefficients()."""

    def test_first_period(self, table_stats):
        """ell=0, T=(0,4): y0 + 2 z0 + z4 >= 6."""
        cut = mixing_cut(table_stats, MixingSet(ell=0, T=(0, 4)))
        assert coefficients(cut) == {"y[0]": 1.0, "z[0]": 2.0, "z[4]": 1.0}
        assert cut.rhs == 6.0

    def test_empty_set_uses_closing_scenario(self, table_stats):
        """An empty T leads with the scenario ranked k+1."""
        lead, alphas = mixing_coefficients(table_stats, 1, ())
        assert lead == 9.0
        assert alphas == {}

    def test_order_enforced(self, table_stats):
        """T must follow descending cumulative demand."""
        with pytest.raises(CutSpecError) as exc_info:
            mixing_cut(table_stats, MixingSet(ell=0, T=(4, 0)))
        assert "descending" in str(exc_info.value)

    def test_outside_top_set(self, table_stats):
        """Scenario 1 is not among the top-2 of period 0."""
        with pytest.raises(CutSpecError):
            mixing_cut(table_stats, MixingSet(ell=0, T=(1,)))


class TestNewCut:
    """Test new_cut()."""

    def test_hybrid_example(self, table_stats):
        """ell=1, S={0}, T_0=(0,4), top=(2,3): y0 + 5 x1 + 2 z0 + z2 + z3 + z4 >= 11."""
        spec = NewCutSpec(ell=1, S=(0,), t_sets={0: (0, 4)}, top=(2, 3))
        cut = new_cut(table_stats, spec)
        assert coefficients(cut) == {"y[0]": 1.0, "x[1]": 5.0, "z[0]": 2.0, "z[2]": 1.0, "z[3]": 1.0, "z[4]": 1.0}
        assert cut.rhs == 11.0
        assert cut.provenance.t_sets == {0: (0, 4), 1: (2, 3)}

    def test_no_s_bar_is_mixing(self, table_stats):
        """With S-bar empty the hybrid cut has the mixing coefficients."""
        hybrid = new_cut(table_stats, NewCutSpec(ell=1, S=(0, 1), top=(2, 3)))
        mixing = mixing_cut(table_stats, MixingSet(ell=1, T=(2, 3)))
        assert coefficients(hybrid) == coefficients(mixing)
        assert hybrid.rhs == mixing.rhs

    def test_period_zero_in_s(self, table_stats):
        """Period 0 must belong to S."""
        with pytest.raises(CutSpecError):
            new_cut(table_stats, NewCutSpec(ell=1, S=(1,), t_sets={0: (0,)}, top=(2,)))

    def test_missing_t_set(self, table_stats):
        """Every S-bar period needs the set of its predecessor."""
        with pytest.raises(CutSpecError) as exc_info:
            new_cut(table_stats, NewCutSpec(ell=1, S=(0,), top=(2, 3)))
        assert "t_sets" in str(exc_info.value)

    def test_anchor_required(self, table_stats):
        """An anchored top set starts with the largest scenario of ell."""
        with pytest.raises(CutSpecError):
            new_cut(table_stats, NewCutSpec(ell=1, S=(0, 1), top=(3,)))

    def test_negative_ell_rejected(self):
        """ell is a period index."""
        with pytest.raises(ValidationError):
            NewCutSpec(ell=-1, S=(0,))


class TestStockCut:
    """Test stock_cut()."""

    def test_inventory_example(self, table_stats):
        """ell=1, j=0, T=(2,3): s[0,0] + 5 x1 + z2 + z3 >= 5."""
        cut = stock_cut(table_stats, 1, 0, MixingSet(ell=1, T=(2, 3)))
        assert coefficients(cut) == {"s[0,0]": 1.0, "x[1]": 5.0, "z[2]": 1.0, "z[3]": 1.0}
        assert cut.rhs == 5.0

    def test_period_zero_rejected(self, table_stats):
        """Stock cuts start at period 1."""
        with pytest.raises(CutSpecError):
            stock_cut(table_stats, 0, 0, MixingSet(ell=0, T=(0,)))

    def test_mismatched_set(self, table_stats):
        """The mixing set must belong to ell."""
        with pytest.raises(CutSpecError):
            stock_cut(table_stats, 1, 0, MixingSet(ell=0, T=(0,)))

    def test_zero_gap_drops_x(self):
        """Equal demand at the top and in scenario j leaves rhs 0."""
        inst = Instance(n=2, m=2, epsilon=0.0, f=(1, 1), c=(1, 1), h=(1, 1), d=((4, 0), (1, 1)))
        cut = stock_cut(demand_stats(inst), 1, 0, MixingSet(ell=1, T=()))
        assert cut.rhs == 0.0
        assert "x[1]" not in coefficients(cut)


class TestDominance:
    """Test dominating_cut() and dominance_holds()."""

    def test_dominating_example(self, table_stats):
        """The hybrid cut of period 1 with T_0=(0,4) reads y0 + 3 x1 + 2 z0 + z4 >= 9."""
        assert dominance_holds(table_stats, 0)
        cut = dominating_cut(table_stats, 0, (0, 4))
        assert coefficients(cut) == {"y[0]": 1.0, "x[1]": 3.0, "z[0]": 2.0, "z[4]": 1.0}
        assert cut.rhs == 9.0

    def test_slack_difference(self, table_stats):
        """Mixing slack minus hybrid slack is (9 - 6)(1 - x1) at any point."""
        mixing = mixing_cut(table_stats, MixingSet(ell=0, T=(0, 4)))
        hybrid = dominating_cut(table_stats, 0, (0, 4))
        rng = np.random.default_rng(3)
        for _ in range(20):
            point = ModelPoint(x=rng.uniform(size=2), y=rng.uniform(0, 12, size=2), z=rng.uniform(size=5))
            difference = -mixing.violation(point) + hybrid.violation(point)
            assert difference == pytest.approx(3.0 * (1.0 - point.x[1]))

    def test_last_period(self, table_stats):
        """The last period has no successor."""
        assert not dominance_holds(table_stats, 1)
        with pytest.raises(CutSpecError):
            dominating_cut(table_stats, 1, (2,))


class TestUncapacitated:
    """Test uls_cut() and all_uls_cuts()."""

    def test_needs_zero_risk(self, table_stats):
        """k > 0 is refused."""
        with pytest.raises(CutSpecError):
            uls_cut(table_stats, 0, [0])

    def test_family_size(self, make_instance):
        """2^(ell+1) cuts per period."""
        stats = demand_stats(make_instance(n=3, m=4, epsilon=0.0))
        assert len(all_uls_cuts(stats)) == 2 + 4 + 8

    def test_empty_s(self, make_instance):
        """S empty gives x coefficients D_top(ell) - D_top(i-1)."""
        stats = demand_stats(make_instance(n=2, m=3, epsilon=0.0))
        cut = uls_cut(stats, 1, [])
        assert cut.coefficient(VarRef.x(0)) == stats.top(1)
        assert cut.coefficient(VarRef.x(1)) == pytest.approx(stats.top(1) - stats.top(0))


class TestCutPool:
    """Test CutPool."""

    def test_duplicates_suppressed(self, table_stats):
        """The same cut is pooled once."""
        pool = CutPool()
        cut = mixing_cut(table_stats, MixingSet(ell=0, T=(0, 4)))
        assert pool.add(cut, 1.5)
        assert not pool.add(mixing_cut(table_stats, MixingSet(ell=0, T=(0, 4))))
        assert len(pool) == 1
        assert cut in pool

    def test_counts(self, table_stats):
        """Every family appears in counts()."""
        pool = CutPool()
        pool.add(mixing_cut(table_stats, MixingSet(ell=0, T=(0,))))
        pool.add(stock_cut(table_stats, 1, 0, MixingSet(ell=1, T=(2, 3))))
        counts = pool.counts()
        assert counts["mixing"] == 1
        assert counts["stock"] == 1
        assert counts["benders"] == 0
        assert pool.count(CutFamily.NEW) == 0

    def test_cut_log(self, tmp_path, table_stats):
        """The CSV has one row per cut and the audit columns."""
        pool = CutPool()
        pool.add(new_cut(table_stats, NewCutSpec(ell=1, S=(0,), t_sets={0: (0, 4)}, top=(2, 3))), 2.0)
        pool.add(ls_bigm_cut(table_stats, 2, 1, [0]))
        path = tmp_path / "cuts.csv"
        pool.write_cut_log(path)
        frame = pd.read_csv(path, keep_default_na=False)
        assert list(frame.columns) == CUT_LOG_COLUMNS
        assert frame.loc[0, "family"] == "new"
        assert frame.loc[0, "Tsets"] == "0:0 4;1:2 3"
        assert str(frame.loc[1, "scenario"]) == "2"
