"""
Engine factory for selecting and sharing the LP engine instance.
"""

import logging
import os
from typing import Optional

from lotsizing.lp.backends.simplex import BoundedDualSimplex
from lotsizing.lp.backends.tableau import DenseTableauSimplex
from lotsizing.lp.interfaces import LpEngine

logger = logging.getLogger(__name__)

# Singleton engine and engine name
_engine: Optional[LpEngine] = None
_engine_name: Optional[str] = None


def make_lp_engine(name: str) -> LpEngine:
    """
    Builds a fresh engine by name ("simplex" or "tableau").
    """
    if name == "simplex":
        return BoundedDualSimplex()
    if name == "tableau":
        return DenseTableauSimplex()
    raise ValueError(f"Unsupported LP engine {name!r}.")


def get_lp_engine() -> LpEngine:
    """
    Returns the shared engine selected by LOTSIZING_LP_ENGINE (default "simplex").
    Engines keep no state between solves, so one instance serves every caller.
    """
    global _engine, _engine_name
    if _engine is None:
        _engine_name = os.getenv("LOTSIZING_LP_ENGINE", "simplex").strip().lower()
        _engine = make_lp_engine(_engine_name)
        logger.debug("Using LP engine %s", _engine_name)
    return _engine


def reset_lp_engine():
    """
    Forgets the shared engine so the next call re-reads the environment.
    """
    global _engine, _engine_name
    _engine = None
    _engine_name = None
