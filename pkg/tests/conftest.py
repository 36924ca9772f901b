"""
Pytest configuration and shared fixtures.
"""

# pylint: disable=protected-access
import pytest

from lotsizing.instance import GeneratorConfig, demand_stats, generate
from lotsizing.lp.backends.simplex import BoundedDualSimplex
from lotsizing.lp.backends.tableau import DenseTableauSimplex
from lotsizing.verification import reference_instance
from storage.backends.sqlite import SQLiteRunStore


@pytest.fixture
def table_instance():
    """Two periods, five scenarios, epsilon 0.4 so that k = 2."""
    return reference_instance()


@pytest.fixture
def table_stats(table_instance):
    """Demand statistics of the two-period instance."""
    return demand_stats(table_instance)


@pytest.fixture
def simplex():
    """The production bounded dual simplex."""
    return BoundedDualSimplex()


@pytest.fixture
def tableau():
    """The reference two-phase tableau simplex."""
    return DenseTableauSimplex()


@pytest.fixture
def make_instance():
    """Factory for small random instances with demands in 1..20."""

    def _make(n=3, m=5, epsilon=0.2, seed=0, **ranges):
        config = GeneratorConfig(**{"d_range": (1, 20), **ranges})
        return generate(n, m, epsilon, seed, config)

    return _make


@pytest.fixture
def in_memory_store():
    """In-memory SQLite run store."""
    store = SQLiteRunStore(":memory:")
    yield store
    store.close()


@pytest.fixture(autouse=True)
def _reset_engine_singleton():
    """Each test starts without a cached LP engine."""
    from lotsizing.lp import engine_factory

    engine_factory.reset_lp_engine()
    yield
    engine_factory.reset_lp_engine()
