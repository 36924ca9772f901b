"""
Constructors of the cut families from explicit parameters.

Every generator checks its parameters against the demand statistics and
raises CutSpecError when they break the rules of the family.
"""

import itertools
import logging
from typing import Iterable

from lotsizing.errors import CutSpecError
from lotsizing.formulations import VarRef
from lotsizing.instance import DemandStats

from .models import Cut, CutFamily, CutProvenance, MixingSet, NewCutSpec

logger = logging.getLogger(__name__)


def _check_mixing_set(stats: DemandStats, i: int, T: tuple[int, ...]) -> None:
    if i < 0 or i >= stats.n:
        raise CutSpecError(f"period {i} outside the horizon")
    top = stats.top_set(i)
    if len(set(T)) != len(T):
        raise CutSpecError(f"T for period {i} repeats a scenario")
    if any(j not in top for j in T):
        raise CutSpecError(f"T for period {i} must be a subset of the top-{stats.k} scenarios {top}")
    ranks = [top.index(j) for j in T]
    if ranks != sorted(ranks):
        raise CutSpecError(f"T for period {i} must follow descending cumulative demand")


def mixing_coefficients(stats: DemandStats, i: int, T: tuple[int, ...]) -> tuple[float, dict[int, float]]:
    """
    Leading demand D[t(1), i] and the z coefficients D[t(p), i] - D[t(p+1), i]
    of a mixing set, closed by the scenario ranked k+1.
    """
    chain = list(T) + [stats.closing(i)]
    alphas = {}
    for p, j in enumerate(T):
        alphas[j] = stats.cum(j, i) - stats.cum(chain[p + 1], i)
    return stats.cum(chain[0], i), alphas


def _terms(pairs: Iterable[tuple[VarRef, float]]) -> tuple[tuple[VarRef, float], ...]:
    return tuple((ref, float(coef)) for ref, coef in pairs if coef != 0.0)


def ls_bigm_cut(stats: DemandStats, j: int, ell: int, S: Iterable[int]) -> Cut:
    """
    Scenario-wise (l, S) inequality:
    sum_{i in S} y_i + sum_{i not in S} D[j, i..ell] x_i + D[j, 0..ell] z_j >= D[j, 0..ell].
    """
    if ell < 0 or ell >= stats.n:
        raise CutSpecError(f"period {ell} outside the horizon")
    chosen = tuple(sorted(set(S)))
    if j < 0 or j >= stats.m:
        raise CutSpecError(f"scenario {j} out of range")
    if any(i < 0 or i > ell for i in chosen):
        raise CutSpecError(f"S must be a subset of periods 0..{ell}")
    total = stats.cum(j, ell)
    pairs = []
    for i in range(ell + 1):
        if i in chosen:
            pairs.append((VarRef.y(i), 1.0))
        else:
            pairs.append((VarRef.x(i), total - stats.cum(j, i - 1)))
    pairs.append((VarRef.z(j), total))
    return Cut(
        terms=_terms(pairs),
        rhs=total,
        family=CutFamily.LS_BIGM,
        provenance=CutProvenance(ell=ell, scenario=j, S=chosen),
    )


def mixing_cut(stats: DemandStats, ms: MixingSet) -> Cut:
    """
    sum_{i<=ell} y_i + sum_p (D[t(p)] - D[t(p+1)]) z_{t(p)} >= D[t(1)].
    """
    _check_mixing_set(stats, ms.ell, ms.T)
    lead, alphas = mixing_coefficients(stats, ms.ell, ms.T)
    pairs = [(VarRef.y(i), 1.0) for i in range(ms.ell + 1)]
    pairs += [(VarRef.z(j), alpha) for j, alpha in alphas.items()]
    return Cut(
        terms=_terms(pairs),
        rhs=lead,
        family=CutFamily.MIXING,
        provenance=CutProvenance(ell=ms.ell, S=tuple(range(ms.ell + 1)), t_sets={ms.ell: ms.T}),
    )


def new_cut(stats: DemandStats, spec: NewCutSpec) -> Cut:
    """
    Hybrid inequality for period ell:
    sum_{i in S} y_i + sum_{i in S-bar} (D_top - D[t_{i-1}(1), i-1]) x_i + sum_j alpha-bar_j z_j >= D_top.
    """
    ell = spec.ell
    if ell >= stats.n:
        raise CutSpecError(f"period {ell} outside the horizon")
    S = tuple(sorted(set(spec.S)))
    if any(i < 0 or i > ell for i in S):
        raise CutSpecError(f"S must be a subset of periods 0..{ell}")
    if 0 not in S:
        raise CutSpecError("period 0 must belong to S")
    s_bar = spec.s_bar()
    needed = {i - 1 for i in s_bar}
    if set(spec.t_sets) != needed:
        raise CutSpecError(f"t_sets must be given exactly for periods {sorted(needed)}")

    _check_mixing_set(stats, ell, spec.top)
    if spec.anchor_top:
        if stats.k > 0 and (not spec.top or spec.top[0] != stats.sigma_desc[ell, 0]):
            raise CutSpecError(f"top set must start with scenario {int(stats.sigma_desc[ell, 0])}")
    elif spec.top:
        raise CutSpecError("an unanchored top set must be empty")
    d_top, top_alphas = mixing_coefficients(stats, ell, spec.top)

    alpha_bar: dict[int, float] = dict(top_alphas)
    x_pairs = []
    for i in s_bar:
        T = spec.t_sets[i - 1]
        _check_mixing_set(stats, i - 1, T)
        lead, alphas = mixing_coefficients(stats, i - 1, T)
        coef = d_top - lead
        if coef < 0:
            raise CutSpecError(f"x coefficient of period {i} would be negative ({coef:g})")
        x_pairs.append((VarRef.x(i), coef))
        for j, alpha in alphas.items():
            alpha_bar[j] = max(alpha_bar.get(j, 0.0), alpha)

    pairs = [(VarRef.y(i), 1.0) for i in S] + x_pairs
    pairs += [(VarRef.z(j), alpha_bar[j]) for j in sorted(alpha_bar)]
    t_sets = dict(spec.t_sets)
    t_sets[ell] = spec.top
    return Cut(
        terms=_terms(pairs),
        rhs=d_top,
        family=CutFamily.NEW,
        provenance=CutProvenance(ell=ell, S=S, t_sets=t_sets),
    )


def stock_cut(stats: DemandStats, ell: int, j: int, ms: MixingSet) -> Cut:
    """
    Inventory inequality for ell >= 1 and scenario j:
    s[j, ell-1] + (D[t(1), ell] - D[j, ell-1]) x_ell + sum_p alpha_p z_{t(p)} >= D[t(1), ell] - D[j, ell-1].
    """
    if ell < 1 or ell >= stats.n:
        raise CutSpecError(f"stock cuts need 1 <= ell <= {stats.n - 1}")
    if ms.ell != ell:
        raise CutSpecError(f"mixing set belongs to period {ms.ell}, expected {ell}")
    if j < 0 or j >= stats.m:
        raise CutSpecError(f"scenario {j} out of range")
    _check_mixing_set(stats, ell, ms.T)
    lead, alphas = mixing_coefficients(stats, ell, ms.T)
    gap = lead - stats.cum(j, ell - 1)
    if gap < 0:
        raise CutSpecError(f"x coefficient of period {ell} would be negative ({gap:g})")
    pairs = [(VarRef.s(j, ell - 1), 1.0), (VarRef.x(ell), gap)]
    pairs += [(VarRef.z(t), alpha) for t, alpha in alphas.items()]
    return Cut(
        terms=_terms(pairs),
        rhs=gap,
        family=CutFamily.STOCK,
        provenance=CutProvenance(ell=ell, scenario=j, t_sets={ell: ms.T}),
    )


def uls_cut(stats: DemandStats, ell: int, S: Iterable[int]) -> Cut:
    """
    The k = 0 form of the hybrid inequality, for any S within 0..ell:
    sum_{i in S} y_i + sum_{i not in S} (D_top(ell) - D_top(i-1)) x_i >= D_top(ell),
    with D_top(-1) = 0.
    """
    if stats.k != 0:
        raise CutSpecError("uncapacitated (l, S) cuts require k = 0")
    if ell < 0 or ell >= stats.n:
        raise CutSpecError(f"period {ell} outside the horizon")
    chosen = tuple(sorted(set(S)))
    if any(i < 0 or i > ell for i in chosen):
        raise CutSpecError(f"S must be a subset of periods 0..{ell}")
    d_top = stats.top(ell)
    pairs = []
    for i in range(ell + 1):
        if i in chosen:
            pairs.append((VarRef.y(i), 1.0))
        else:
            before = stats.top(i - 1) if i > 0 else 0.0
            pairs.append((VarRef.x(i), d_top - before))
    return Cut(terms=_terms(pairs), rhs=d_top, family=CutFamily.NEW, provenance=CutProvenance(ell=ell, S=chosen))


def all_uls_cuts(stats: DemandStats) -> list[Cut]:
    """Every k = 0 (l, S) cut, 2^(ell+1) per period."""
    cuts = []
    for ell in range(stats.n):
        for size in range(ell + 2):
            for S in itertools.combinations(range(ell + 1), size):
                cuts.append(uls_cut(stats, ell, S))
    return cuts


def dominating_cut(stats: DemandStats, ell: int, T: tuple[int, ...]) -> Cut:
    """
    Hybrid inequality of period ell+1 with S = 0..ell, S-bar = {ell+1}, an empty
    top set and T as the set of period ell. Stronger than the mixing cut of
    (ell, T) whenever dominance_holds(stats, ell) and T starts with the
    largest scenario of ell.
    """
    if ell + 1 >= stats.n:
        raise CutSpecError(f"period {ell} has no successor")
    spec = NewCutSpec(ell=ell + 1, S=tuple(range(ell + 1)), t_sets={ell: tuple(T)}, top=(), anchor_top=False)
    return new_cut(stats, spec)


def dominance_holds(stats: DemandStats, ell: int) -> bool:
    """D of the scenario ranked k+1 at ell+1 is at least the largest D at ell."""
    if ell + 1 >= stats.n:
        return False
    return stats.cum(stats.closing(ell + 1), ell + 1) >= stats.top(ell)

