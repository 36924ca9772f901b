"""
Value types of the cut families.
"""

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from lotsizing.formulations import ModelPoint, VarKind, VarRef

VIOLATION_TOL = 1e-6


def violation_tolerance(rhs: float) -> float:
    """A cut counts as violated when lhs < rhs - violation_tolerance(rhs)."""
    return VIOLATION_TOL * max(1.0, abs(rhs))


class CutFamily(str, Enum):
    LS_BIGM = "ls"
    MIXING = "mixing"
    NEW = "new"
    STOCK = "stock"
    BENDERS_OPT = "benders"


class CutProvenance(BaseModel):
    """Where a cut came from: period, partition, T-sets by period, scenario."""

    model_config = ConfigDict(frozen=True)

    ell: Optional[int] = None
    scenario: Optional[int] = None
    S: tuple[int, ...] = ()
    t_sets: dict[int, tuple[int, ...]] = Field(default_factory=dict)


class Cut(BaseModel):
    """
    Sparse inequality sum(coef * var) >= rhs over model variables.
    """

    model_config = ConfigDict(frozen=True)

    terms: tuple[tuple[VarRef, float], ...]
    rhs: float
    family: CutFamily
    provenance: CutProvenance = Field(default_factory=CutProvenance)

    @field_validator("terms")
    @classmethod
    def _finite_terms(cls, v: tuple[tuple[VarRef, float], ...]) -> tuple[tuple[VarRef, float], ...]:
        seen = set()
        for ref, coef in v:
            if not math.isfinite(coef):
                raise ValueError("coefficients must be finite")
            if ref in seen:
                raise ValueError(f"variable {ref} appears twice")
            seen.add(ref)
        return v

    @field_validator("rhs")
    @classmethod
    def _finite_rhs(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("rhs must be finite")
        return v

    @property
    def name(self) -> str:
        p = self.provenance
        parts = [self.family.value]
        if p.ell is not None:
            parts.append(f"l{p.ell}")
        if p.scenario is not None:
            parts.append(f"j{p.scenario}")
        return "_".join(parts)

    def coefficient(self, ref: VarRef) -> float:
        for other, coef in self.terms:
            if other == ref:
                return coef
        return 0.0

    def kinds(self) -> set[VarKind]:
        return {ref.kind for ref, _ in self.terms}

    def lhs(self, point: ModelPoint) -> float:
        return float(sum(coef * point.value(ref) for ref, coef in self.terms))

    def violation(self, point: ModelPoint) -> float:
        """rhs - lhs at the point; positive when the point is cut off."""
        return self.rhs - self.lhs(point)

    def is_violated(self, point: ModelPoint) -> bool:
        return self.violation(point) > violation_tolerance(self.rhs)

    def key(self) -> tuple:
        """Identity used for duplicate suppression (coefficients to 1e-9)."""
        terms = tuple(sorted((str(ref), round(coef, 9)) for ref, coef in self.terms if coef != 0.0))
        return terms, round(self.rhs, 9)

    def __str__(self) -> str:
        body = " + ".join(f"{coef:g} {ref}" for ref, coef in self.terms) or "0"
        return f"{body} >= {self.rhs:g}"


class MixingSet(BaseModel):
    """
    Scenarios T of period ell in descending cumulative-demand order, drawn
    from the top-k set of that period. The closing scenario is the one ranked
    k+1 at ell.
    """

    model_config = ConfigDict(frozen=True)

    ell: int = Field(..., ge=0)
    T: tuple[int, ...] = ()


class NewCutSpec(BaseModel):
    """
    Parameters of one hybrid inequality for period ell.

    `S` lists the periods (0..ell) whose y appear; the others form S-bar and
    need a set in `t_sets` keyed by the preceding period. `top` is the set of
    period ell; when `anchor_top` it must start with the largest scenario of
    ell (or be empty when k = 0), otherwise it must be empty and the top
    demand is that of the closing scenario.
    """

    model_config = ConfigDict(frozen=True)

    ell: int = Field(..., ge=0)
    S: tuple[int, ...]
    t_sets: dict[int, tuple[int, ...]] = Field(default_factory=dict)
    top: tuple[int, ...] = ()
    anchor_top: bool = True

    def s_bar(self) -> tuple[int, ...]:
        chosen = set(self.S)
        return tuple(i for i in range(self.ell + 1) if i not in chosen)
