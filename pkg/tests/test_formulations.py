"""
Tests for lotsizing/formulations.py.

Tests cover:
- row and column counts of every formulation
- the compact supporting lines and the envelope property
- the risk-free model and its k = 0 precondition
- cut translation, point splitting and the LP text dump
- chance_feasible against direct evaluation
"""

import numpy as np
import pytest
from pydantic import ValidationError

from lotsizing.cuts.generators import mixing_cut, stock_cut
from lotsizing.cuts.models import MixingSet
from lotsizing.errors import ModelMismatchError
from lotsizing.formulations import (
    Formulation,
    VarKind,
    VarRef,
    build_benders_master,
    build_compact,
    build_dep,
    build_model,
    build_risk_free,
    chance_feasible,
    short_scenarios,
    theta_prime_envelope,
    total_inventory,
)
from lotsizing.instance import demand_stats
from lotsizing.lp.models import ConstraintSense


class TestModelSizes:
    """Row and column counts on the two-period instance."""

    def test_dep(self, table_instance):
        """2nm + n + 1 rows and 2n + m + nm columns."""
        model = build_dep(table_instance)
        assert (model.num_rows, model.num_cols) == (23, 19)
        assert model.formulation == Formulation.DEP

    def test_compact(self, table_instance):
        """nm + 1 + n + n(k+1) rows and 2n + m + n columns."""
        model = build_compact(table_instance)
        assert (model.num_rows, model.num_cols) == (19, 11)

    def test_benders_master(self, table_instance):
        """Inventory replaced by one theta per scenario."""
        model = build_benders_master(table_instance)
        assert model.num_cols == 14
        assert model.num_rows == 13
        assert all(model.columns[p].cost == pytest.approx(0.2) for p in model.columns_of(VarKind.THETA))

    def test_binary_columns(self, table_instance):
        """x columns come before z columns."""
        model = build_dep(table_instance)
        assert model.binary_columns() == [0, 1, 4, 5, 6, 7, 8]
        assert all(model.columns[p].binary for p in model.binary_columns())


class TestCompactRows:
    """The supporting lines of Theta'."""

    def test_second_period_lines(self, table_instance):
        """Theta'_1 >= 5Y - 46, 4Y - 35 and 3Y - 25."""
        model = build_compact(table_instance)
        lines = [row for row in model.rows if row.name.startswith("envelope[1,")]
        assert [row.rhs for row in lines] == [-46.0, -35.0, -25.0]
        y0 = model.column(VarRef.y(0))
        for row, count in zip(lines, (5, 4, 3)):
            assert row.sense == ConstraintSense.GE
            assert dict(zip(row.indices, row.values))[y0] == -count

    def test_zero_risk_single_line(self, make_instance):
        """k = 0 leaves one line per period."""
        inst = make_instance(n=3, m=4, epsilon=0.0)
        model = build_compact(inst)
        assert sum(1 for row in model.rows if row.name.startswith("envelope")) == 3

    def test_envelope_matches_inventory(self, table_stats):
        """Where at most k scenarios are short the envelope is the total inventory."""
        for i in range(table_stats.n):
            for cum_y in np.linspace(0.0, 14.0, 57):
                if short_scenarios(table_stats, i, cum_y) <= table_stats.k:
                    assert theta_prime_envelope(table_stats, i, cum_y) == pytest.approx(total_inventory(table_stats, i, cum_y))

    def test_envelope_example(self, table_stats):
        """Production 10 in period 1 leaves 5 units over all scenarios."""
        assert theta_prime_envelope(table_stats, 1, 10.0) == pytest.approx(5.0)


class TestRiskFree:
    """Test build_risk_free()."""

    def test_requires_zero_risk(self, table_instance):
        """k > 0 is refused."""
        with pytest.raises(ValueError) as exc_info:
            build_risk_free(table_instance)
        assert "k = 0" in str(exc_info.value)

    def test_shape_and_offset(self, make_instance):
        """n demand rows, n setup rows and a nonpositive offset."""
        inst = make_instance(n=3, m=4, epsilon=0.0)
        model = build_model(inst, Formulation.RISK_FREE)
        assert model.num_cols == 6
        assert model.num_rows == 6
        assert model.offset <= 0.0
        assert not model.owns(VarKind.Z)


class TestCutRows:
    """Test MipModel.cut_row() and point()."""

    def test_mixing_row(self, table_instance, table_stats):
        """The mixing cut of period 0 becomes a GE row over y0, z0 and z4."""
        model = build_compact(table_instance, table_stats)
        row = model.cut_row(mixing_cut(table_stats, MixingSet(ell=0, T=(0, 4))))
        assert row.sense == ConstraintSense.GE
        assert row.rhs == 6.0
        assert dict(zip(row.indices, row.values)) == {model.column(VarRef.y(0)): 1.0, model.column(VarRef.z(0)): 2.0, model.column(VarRef.z(4)): 1.0}

    def test_stock_cut_needs_inventory(self, table_instance, table_stats):
        """Stock cuts do not translate onto the compact model."""
        model = build_compact(table_instance, table_stats)
        cut = stock_cut(table_stats, 1, 0, MixingSet(ell=1, T=(2, 3)))
        with pytest.raises(ModelMismatchError) as exc_info:
            model.cut_row(cut)
        assert "does not own" in str(exc_info.value)

    def test_point_split(self, table_instance):
        """DEP values split into x, y, z and an m x n inventory matrix."""
        model = build_dep(table_instance)
        values = np.arange(model.num_cols, dtype=float)
        point = model.point(values)
        assert point.x.tolist() == [0.0, 1.0]
        assert point.y.tolist() == [2.0, 3.0]
        assert point.s.shape == (5, 2)
        assert point.value(VarRef.s(1, 0)) == 11.0
        assert point.theta is None

    def test_point_without_inventory(self, table_instance):
        """Asking a compact point for s raises ModelMismatchError."""
        model = build_compact(table_instance)
        point = model.point(np.zeros(model.num_cols))
        with pytest.raises(ModelMismatchError):
            point.value(VarRef.s(0, 0))

    def test_var_ref_arity(self):
        """s takes two indices."""
        with pytest.raises(ValidationError):
            VarRef(kind=VarKind.S, index=(1,))

    def test_lp_text(self, table_instance):
        """The dump lists the objective, every row and every bound."""
        text = build_dep(table_instance).dump_lp_text()
        assert text.startswith("min: 50 x[0]")
        assert "budget:" in text
        assert "bound x[0]: 0 <= x[0] <= 1 bin" in text
        assert len(text.splitlines()) == 1 + 23 + 19


class TestChanceFeasible:
    """Test chance_feasible()."""

    def test_cover_everything(self, table_instance):
        """Producing the largest cumulative demands with no violations is feasible."""
        assert chance_feasible(table_instance, [1, 1], [6, 5], [0, 0, 0, 0, 0])

    def test_too_many_violations(self, table_instance):
        """Three flagged scenarios exceed k = 2."""
        assert not chance_feasible(table_instance, [1, 1], [6, 5], [1, 1, 1, 0, 0])

    def test_setup_required(self, table_instance):
        """Production without a setup is infeasible."""
        assert not chance_feasible(table_instance, [1, 0], [6, 5], [0, 0, 0, 0, 0])

    def test_flagged_scenarios_may_go_short(self, table_instance):
        """Skipping scenarios 2 and 3 allows production 6 then 3."""
        assert chance_feasible(table_instance, [1, 1], [6, 3], [0, 0, 1, 1, 0])
        assert not chance_feasible(table_instance, [1, 1], [6, 3], [0, 0, 1, 0, 0])

    def test_matches_direct_evaluation(self, make_instance):
        """Random candidates get the verdict of a direct constraint check."""
        rng = np.random.default_rng(5)
        inst = make_instance(n=3, m=6, epsilon=0.34)
        stats = demand_stats(inst)
        for _ in range(200):
            x = rng.integers(0, 2, size=inst.n)
            y = rng.uniform(0, 30, size=inst.n) * x
            z = (rng.uniform(size=inst.m) < 0.3).astype(float)
            cum_y = np.cumsum(y)
            expected = z.sum() <= stats.k and np.all(y <= stats.M * x + 1e-6) and all(np.all(cum_y >= stats.D[j] - 1e-6) for j in range(inst.m) if z[j] == 0)
            assert chance_feasible(inst, x, y, z, stats=stats) == expected
