"""
Valid inequalities for the chance-constrained lot-sizing polyhedra.

Key Components:

- **models**: Cut, CutFamily, MixingSet, NewCutSpec
- **generators**: constructors for the (l, S) big-M, mixing, hybrid and stock families
- **separation**: exact and heuristic separation at fractional points
- **pool**: duplicate suppression, counters and the CSV cut log
"""

from lotsizing.formulations import ModelPoint

from .generators import (
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
from .models import Cut, CutFamily, CutProvenance, MixingSet, NewCutSpec, violation_tolerance
from .pool import CutPool, CutRecord
from .separation import (
    separate_ls_bigm,
    separate_mixing,
    separate_mixing_anchored,
    separate_mixing_free,
    separate_new,
    separate_stock,
)

__all__ = [
    "Cut",
    "CutFamily",
    "CutPool",
    "CutProvenance",
    "CutRecord",
    "MixingSet",
    "ModelPoint",
    "NewCutSpec",
    "all_uls_cuts",
    "dominance_holds",
    "dominating_cut",
    "ls_bigm_cut",
    "mixing_coefficients",
    "mixing_cut",
    "new_cut",
    "separate_ls_bigm",
    "separate_mixing",
    "separate_mixing_anchored",
    "separate_mixing_free",
    "separate_new",
    "separate_stock",
    "stock_cut",
    "uls_cut",
    "violation_tolerance",
]
