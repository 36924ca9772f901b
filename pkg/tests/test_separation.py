"""
Tests for lotsizing/cuts/separation.py.

Tests cover:
- the free and anchored mixing subproblems against subset enumeration
- mixing, hybrid, stock and (l, S) separation at fractional points
- no cuts at an integral feasible point
"""

import numpy as np
import pytest

from lotsizing.cuts.generators import stock_cut
from lotsizing.cuts.models import CutFamily, MixingSet
from lotsizing.cuts.separation import (
    separate_ls_bigm,
    separate_mixing,
    separate_mixing_anchored,
    separate_mixing_free,
    separate_new,
    separate_stock,
)
from lotsizing.formulations import ModelPoint
from lotsizing.instance import demand_stats
from lotsizing.oracle import brute_force_separation


@pytest.fixture
def feasible_point(table_stats):
    """Production 6 then 5 meets every scenario; inventory is the surplus."""
    y = np.array([6.0, 5.0])
    s = np.maximum(np.cumsum(y) - table_stats.D, 0.0)
    return ModelPoint(x=np.ones(2), y=y, z=np.zeros(5), s=s)


class TestMixingSubproblems:
    """Test separate_mixing_free() and separate_mixing_anchored()."""

    def test_covered_top_set(self, table_stats):
        """z = 1 on the top set and no setup next: the empty set, value 0."""
        z = np.zeros(5)
        z[[2, 3]] = 1.0
        value, T = separate_mixing_free(table_stats, 1, z, 0.0)
        assert value == pytest.approx(0.0)
        assert T == ()

    def test_free_at_zero(self, table_stats):
        """z = 0 and x = 1: value is minus the largest demand."""
        value, T = separate_mixing_free(table_stats, 1, np.zeros(5), 1.0)
        assert value == pytest.approx(-11.0)
        assert T[0] == 2

    def test_anchored_at_zero(self, table_stats):
        """z = 0: value 0 with the top scenario first."""
        value, T = separate_mixing_anchored(table_stats, 0, np.zeros(5))
        assert value == pytest.approx(0.0)
        assert T[0] == 0

    def test_anchored_zero_risk(self, make_instance):
        """k = 0 returns the base case."""
        stats = demand_stats(make_instance(n=2, m=3, epsilon=0.0))
        assert separate_mixing_anchored(stats, 0, np.zeros(3)) == (0.0, ())

    def test_anchored_shrinks_top_coefficient(self, table_stats):
        """With z = 1 on the top scenario the next one joins T."""
        z = np.zeros(5)
        z[2] = 1.0
        value, T = separate_mixing_anchored(table_stats, 1, z)
        assert T == (2, 3)
        assert value == pytest.approx(1.0)
        assert value == pytest.approx(brute_force_separation(table_stats, 1, z, anchored=True)[0])

    def test_matches_enumeration(self, make_instance):
        """Random z and x on k = 12: both subproblems equal subset enumeration."""
        rng = np.random.default_rng(17)
        stats = demand_stats(make_instance(n=2, m=25, epsilon=0.48, seed=4))
        assert stats.k == 12
        for _ in range(20):
            z = rng.uniform(size=stats.m)
            x_next = float(rng.uniform())
            i = int(rng.integers(0, stats.n))
            fast, _ = separate_mixing_free(stats, i, z, x_next)
            slow, _ = brute_force_separation(stats, i, z, x_next=x_next)
            assert fast == pytest.approx(slow, abs=1e-9)
            fast, _ = separate_mixing_anchored(stats, i, z)
            slow, _ = brute_force_separation(stats, i, z, anchored=True)
            assert fast == pytest.approx(slow, abs=1e-9)


class TestSeparators:
    """Test the per-family separation routines."""

    def test_mixing_at_zero(self, table_stats):
        """Nothing produced: one violated mixing cut per period."""
        point = ModelPoint(x=np.zeros(2), y=np.zeros(2), z=np.zeros(5))
        cuts = separate_mixing(table_stats, point)
        assert [cut.provenance.ell for cut in cuts] == [0, 1]
        assert [cut.rhs for cut in cuts] == [6.0, 11.0]
        assert all(cut.family == CutFamily.MIXING for cut in cuts)

    def test_new_cut(self, table_stats):
        """x1 = 0, y = (6, 0): the hybrid cut of period 1 is violated by 5."""
        point = ModelPoint(x=np.array([1.0, 0.0]), y=np.array([6.0, 0.0]), z=np.zeros(5))
        cuts = separate_new(table_stats, point)
        assert len(cuts) == 1
        assert cuts[0].family == CutFamily.NEW
        assert cuts[0].rhs == 11.0
        assert cuts[0].violation(point) == pytest.approx(5.0)

    def test_stock_example(self, table_stats):
        """x1 = 0, z = 0, s[0,0] = 0 yields s[0,0] + 5 x1 + z2 + z3 >= 5."""
        point = ModelPoint(x=np.array([1.0, 0.0]), y=np.array([6.0, 0.0]), z=np.zeros(5), s=np.zeros((5, 2)))
        cuts = separate_stock(table_stats, point)
        expected = stock_cut(table_stats, 1, 0, MixingSet(ell=1, T=(2, 3)))
        assert len(cuts) == 1
        assert cuts[0].key() == expected.key()
        assert cuts[0].violation(point) == pytest.approx(5.0)

    def test_stock_without_inventory(self, table_stats):
        """Points without s get no stock cuts."""
        point = ModelPoint(x=np.zeros(2), y=np.zeros(2), z=np.zeros(5))
        assert separate_stock(table_stats, point) == []

    def test_ls_at_zero(self, table_stats):
        """Nothing produced: every (scenario, period) pair yields a cut."""
        point = ModelPoint(x=np.zeros(2), y=np.zeros(2), z=np.zeros(5))
        assert len(separate_ls_bigm(table_stats, point)) == 10

    def test_feasible_point_is_not_cut(self, table_stats, feasible_point):
        """An integral feasible point violates no family."""
        assert separate_mixing(table_stats, feasible_point) == []
        assert separate_new(table_stats, feasible_point) == []
        assert separate_stock(table_stats, feasible_point) == []
        assert separate_ls_bigm(table_stats, feasible_point) == []
