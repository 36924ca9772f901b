"""
Brute-force certifiers for desk-scale instances.

Everything here enumerates the binary patterns (x, z) with at most k
violated scenarios and solves one small LP in the continuous variables per
pattern group. Patterns are grouped by (x, L), where L_t is the largest
cumulative demand among the scenarios kept at period t; the continuous
polyhedron depends on nothing else.

The default LP engine is the reference tableau simplex, so the certifiers
stay independent of the engine under test.
"""

import itertools
import logging
import math
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .cuts.generators import all_uls_cuts
from .cuts.models import Cut
from .errors import ModelMismatchError, OracleGuardError
from .formulations import VarKind, build_risk_free
from .instance import DemandStats, Instance, demand_stats
from .lp.backends.tableau import DenseTableauSimplex
from .lp.interfaces import LpEngine
from .lp.models import ConstraintSense, LinearProgram, LpStatus, make_row

logger = logging.getLogger(__name__)

MAX_PATTERNS = 10**6
MAX_SEPARATION_K = 15
MAX_HULL_N = 6
MAX_FACET_N = 3
MAX_FACET_M = 6
RANK_TOL = 1e-7
INTEGRALITY_TOL = 1e-6


class Space(str, Enum):
    P = "P"
    P_PLUS = "P_plus"


class ValidityVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    valid: bool
    worst_x: Optional[tuple[int, ...]] = None
    worst_z: Optional[tuple[int, ...]] = None
    worst_slack: float = Field(..., description="min of lhs - rhs over the polyhedron")


class BruteForceSolution(BaseModel):
    x: list[float]
    y: list[float]
    z: list[float]
    s: list[list[float]]


class HullCheck(BaseModel):
    passed: bool
    trials: int
    fractional_trials: int
    worst_fractionality: float


class FacetCheck(BaseModel):
    rank: int
    dimension: int
    confirmed: bool
    points: int


class PatternGroup(BaseModel):
    """Binary patterns sharing x and the kept-demand profile L."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: tuple[int, ...]
    L: tuple[float, ...]
    z: np.ndarray = Field(..., description="one row per z pattern of the group")


def pattern_count(inst: Instance) -> int:
    """2^n times the number of z patterns with at most k ones."""
    return 2**inst.n * sum(math.comb(inst.m, q) for q in range(inst.k + 1))


def _guard(inst: Instance, limit: int = MAX_PATTERNS) -> None:
    count = pattern_count(inst)
    if count > limit:
        raise OracleGuardError(f"{count} binary patterns exceed the enumeration limit of {limit}")


def _z_patterns(m: int, k: int) -> Iterator[tuple[int, ...]]:
    for q in range(k + 1):
        for violated in itertools.combinations(range(m), q):
            z = [0] * m
            for j in violated:
                z[j] = 1
            yield tuple(z)


def binary_patterns(inst: Instance) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every (x, z) with z having at most k ones."""
    _guard(inst)
    for x in itertools.product((0, 1), repeat=inst.n):
        for z in _z_patterns(inst.m, inst.k):
            yield x, z


def pattern_groups(inst: Instance, stats: Optional[DemandStats] = None) -> list[PatternGroup]:
    _guard(inst)
    stats = stats or demand_stats(inst)
    by_profile: dict[tuple[float, ...], list[tuple[int, ...]]] = {}
    for z in _z_patterns(inst.m, inst.k):
        kept = [j for j in range(inst.m) if not z[j]]
        profile = tuple(float(v) for v in stats.D[kept].max(axis=0))
        by_profile.setdefault(profile, []).append(z)
    groups = []
    for x in itertools.product((0, 1), repeat=inst.n):
        for profile, zs in by_profile.items():
            groups.append(PatternGroup(x=x, L=profile, z=np.asarray(zs, dtype=float)))
    return groups


def polyhedron_dimension(inst: Instance, space: Space = Space.P) -> int:
    """Dimension of P (x, y, z) for positive demands, plus n*m inventory coordinates for P+."""
    base = 2 * inst.n + inst.m - 1
    return base + inst.n * inst.m if space == Space.P_PLUS else base


def _inventory_cap(stats: DemandStats) -> float:
    return float(np.sum(stats.M))


def _continuous_lp(inst: Instance, stats: DemandStats, x: Sequence[int], L: Sequence[float], with_s: bool) -> LinearProgram:
    """
    LP over y (and s) for fixed binaries: y_i in [0, M_i x_i], cumulative
    production covering L, and s[j, t] >= Y_t - D[j, t] when with_s.
    Columns are y_0..y_{n-1} then s scenario major.
    """
    lp = LinearProgram()
    for i in range(inst.n):
        lp.add_column(0.0, float(stats.M[i]) * x[i], 0.0, f"y[{i}]")
    if with_s:
        cap = _inventory_cap(stats)
        for j in range(inst.m):
            for t in range(inst.n):
                lp.add_column(0.0, cap, 0.0, f"s[{j},{t}]")
    for t in range(inst.n):
        lp.add_row(make_row([(i, 1.0) for i in range(t + 1)], ConstraintSense.GE, L[t], f"cover[{t}]"))
    if with_s:
        for j in range(inst.m):
            for t in range(inst.n):
                terms = [(inst.n + j * inst.n + t, 1.0)] + [(i, -1.0) for i in range(t + 1)]
                lp.add_row(make_row(terms, ConstraintSense.GE, -stats.cum(j, t), f"inventory[{j},{t}]"))
    return lp


def _set_cost(lp: LinearProgram, cost: Sequence[float]) -> None:
    lp.cost = [float(v) for v in cost]


def brute_force_optimum(inst: Instance, engine: Optional[LpEngine] = None) -> tuple[float, Optional[BruteForceSolution]]:
    """
    Exact optimum of the deterministic equivalent by enumeration; returns
    (inf, None) when no pattern is feasible.
    """
    engine = engine or DenseTableauSimplex()
    stats = demand_stats(inst)
    cost = list(inst.c) + [inst.h[t] / inst.m for _ in range(inst.m) for t in range(inst.n)]
    best, best_solution = math.inf, None
    for group in pattern_groups(inst, stats):
        lp = _continuous_lp(inst, stats, group.x, group.L, with_s=True)
        _set_cost(lp, cost)
        solution = engine.solve(lp)
        if not solution.is_optimal:
            continue
        value = solution.objective + float(np.dot(inst.f, group.x))
        if value < best - 1e-12:
            best = value
            values = solution.x
            best_solution = BruteForceSolution(
                x=[float(v) for v in group.x],
                y=values[: inst.n].tolist(),
                z=group.z[0].tolist(),
                s=values[inst.n :].reshape(inst.m, inst.n).tolist(),
            )
    logger.debug("Brute force optimum %.6f over %d patterns", best, pattern_count(inst))
    return best, best_solution


def validate_cut(inst: Instance, cut: Cut, space: Space = Space.P, engine: Optional[LpEngine] = None, groups: Optional[list[PatternGroup]] = None) -> ValidityVerdict:
    """
    Minimize lhs - rhs of `cut` over P (or P+ when the cut involves s) and
    report the worst pattern. `groups` may be shared across cuts of one instance.
    """
    engine = engine or DenseTableauSimplex()
    stats = demand_stats(inst)
    kinds = cut.kinds()
    if VarKind.S in kinds and space != Space.P_PLUS:
        raise ModelMismatchError("cuts on inventory variables are validated over P_plus")
    if kinds - {VarKind.X, VarKind.Y, VarKind.Z, VarKind.S}:
        raise ModelMismatchError("the oracle only knows x, y, z and s variables")
    with_s = space == Space.P_PLUS
    width = inst.n + (inst.n * inst.m if with_s else 0)
    y_cost = np.zeros(width)
    a_x = np.zeros(inst.n)
    a_z = np.zeros(inst.m)
    for ref, coef in cut.terms:
        if ref.kind == VarKind.Y:
            y_cost[ref.index[0]] += coef
        elif ref.kind == VarKind.S:
            j, t = ref.index
            y_cost[inst.n + j * inst.n + t] += coef
        elif ref.kind == VarKind.X:
            a_x[ref.index[0]] += coef
        else:
            a_z[ref.index[0]] += coef

    worst = math.inf
    worst_x, worst_z = None, None
    for group in groups if groups is not None else pattern_groups(inst, stats):
        lp = _continuous_lp(inst, stats, group.x, group.L, with_s)
        _set_cost(lp, y_cost)
        solution = engine.solve(lp)
        if solution.status == LpStatus.INFEASIBLE:
            continue
        continuous = -math.inf if solution.status == LpStatus.UNBOUNDED else solution.objective
        z_terms = group.z @ a_z
        p = int(np.argmin(z_terms))
        slack = continuous + float(a_x @ np.asarray(group.x, dtype=float)) + float(z_terms[p]) - cut.rhs
        if slack < worst:
            worst = slack
            worst_x, worst_z = group.x, tuple(int(v) for v in group.z[p])
    valid = worst >= -1e-6 * (1.0 + abs(cut.rhs))
    if not valid:
        logger.debug("Cut %s invalid: slack %.6g at x=%s z=%s", cut, worst, worst_x, worst_z)
    return ValidityVerdict(valid=valid, worst_x=worst_x, worst_z=worst_z, worst_slack=worst)


def brute_force_separation(stats: DemandStats, i: int, zhat: Sequence[float], anchored: bool = False, x_next: float = 1.0) -> tuple[float, tuple[int, ...]]:
    """
    Exhaustive minimum of the mixing separation problem of period i over all
    subsets of the top-k set (anchored: subsets containing the top scenario).
    """
    k = stats.k
    if k > MAX_SEPARATION_K:
        raise OracleGuardError(f"k = {k} exceeds the separation enumeration limit of {MAX_SEPARATION_K}")
    if anchored and k == 0:
        return 0.0, ()
    top = stats.top_set(i)
    closing = stats.closing(i)
    best, best_T = math.inf, ()
    for mask in range(1 << k):
        T = tuple(top[p] for p in range(k) if mask >> p & 1)
        if anchored and (not T or T[0] != top[0]):
            continue
        chain = list(T) + [closing]
        value = 0.0 if anchored else -stats.cum(chain[0], i) * x_next
        for p, j in enumerate(T):
            value += (stats.cum(j, i) - stats.cum(chain[p + 1], i)) * zhat[j]
        if value < best - 1e-15:
            best, best_T = value, T
    return float(best), best_T


def hull_integrality_check(inst: Instance, trials: int, seed: int = 0, with_cuts: bool = True, engine: Optional[LpEngine] = None) -> HullCheck:
    """
    Solve the k = 0 relaxation (with every uncapacitated (l, S) cut unless
    `with_cuts` is False) under `trials` random nonnegative costs and check
    that x comes out binary each time.
    """
    if inst.k != 0:
        raise ValueError("hull check requires k = 0")
    if inst.n > MAX_HULL_N:
        raise OracleGuardError(f"n = {inst.n} exceeds the hull check limit of {MAX_HULL_N}")
    engine = engine or DenseTableauSimplex()
    stats = demand_stats(inst)
    model = build_risk_free(inst, stats)
    lp = model.to_lp()
    if with_cuts:
        for cut in all_uls_cuts(stats):
            lp.add_row(model.cut_row(cut))
    rng = np.random.default_rng(seed)
    # lexicographic tie-break
    perturbation = 1e-9 * np.arange(1, lp.num_cols + 1)
    fractional = 0
    worst = 0.0
    x_cols = model.columns_of(VarKind.X)
    for _ in range(trials):
        _set_cost(lp, rng.uniform(0.0, 10.0, size=lp.num_cols) + perturbation)
        solution = engine.solve(lp)
        if not solution.is_optimal:
            raise ValueError(f"hull LP not solved to optimality: {solution.status.value}")
        x = solution.x[x_cols]
        frac = float(np.max(np.abs(x - np.round(x)), initial=0.0))
        worst = max(worst, frac)
        if frac > INTEGRALITY_TOL:
            fractional += 1
    return HullCheck(passed=fractional == 0, trials=trials, fractional_trials=fractional, worst_fractionality=worst)


def affine_rank(points: np.ndarray, tol: float = RANK_TOL) -> int:
    """Number of affinely independent rows of `points`."""
    if len(points) == 0:
        return 0
    diffs = points[1:] - points[0]
    if len(diffs) == 0:
        return 1
    return int(np.linalg.matrix_rank(diffs, tol=tol)) + 1


def _face_points(lp: LinearProgram, width: int, sample_budget: int, rng: np.random.Generator, engine: LpEngine) -> list[np.ndarray]:
    """Optima of +-random objectives over one pattern slice; empty when the slice misses the face."""
    found = []
    for _ in range(sample_budget):
        direction = rng.normal(size=width)
        for sign in (1.0, -1.0):
            _set_cost(lp, sign * direction)
            solution = engine.solve(lp)
            if solution.status == LpStatus.INFEASIBLE:
                return found
            if solution.is_optimal:
                found.append(solution.x)
    return found


def tight_point_rank(
    inst: Instance,
    cut: Cut,
    sample_budget: int = 4,
    space: Space = Space.P,
    seed: int = 0,
    engine: Optional[LpEngine] = None,
) -> FacetCheck:
    """
    Collect points of P (or P+) on the face lhs = rhs by optimizing random
    objectives over each pattern's slice of the face, and return their affine
    rank. Rank equal to the polyhedron dimension confirms a facet; anything
    lower is inconclusive.
    """
    if inst.n > MAX_FACET_N or inst.m > MAX_FACET_M:
        raise OracleGuardError(f"tight-point rank is limited to n <= {MAX_FACET_N}, m <= {MAX_FACET_M}")
    engine = engine or DenseTableauSimplex()
    stats = demand_stats(inst)
    with_s = space == Space.P_PLUS
    if VarKind.S in cut.kinds() and not with_s:
        raise ModelMismatchError("cuts on inventory variables are ranked over P_plus")
    width = inst.n + (inst.n * inst.m if with_s else 0)
    a_cont = np.zeros(width)
    a_x = np.zeros(inst.n)
    a_z = np.zeros(inst.m)
    for ref, coef in cut.terms:
        if ref.kind == VarKind.Y:
            a_cont[ref.index[0]] += coef
        elif ref.kind == VarKind.S:
            j, t = ref.index
            a_cont[inst.n + j * inst.n + t] += coef
        elif ref.kind == VarKind.X:
            a_x[ref.index[0]] += coef
        elif ref.kind == VarKind.Z:
            a_z[ref.index[0]] += coef
        else:
            raise ModelMismatchError("the oracle only knows x, y, z and s variables")

    rng = np.random.default_rng(seed)
    points = []
    for x, z in binary_patterns(inst):
        kept = [j for j in range(inst.m) if not z[j]]
        L = stats.D[kept].max(axis=0)
        lp = _continuous_lp(inst, stats, x, L, with_s)
        target = cut.rhs - float(a_x @ np.asarray(x, dtype=float)) - float(a_z @ np.asarray(z, dtype=float))
        if np.any(a_cont):
            lp.add_row(make_row(list(enumerate(a_cont)), ConstraintSense.EQ, target, "face"))
        elif abs(target) > 1e-9:
            continue
        binaries = (np.asarray(x, dtype=float), np.asarray(z, dtype=float))
        for values in _face_points(lp, width, sample_budget, rng, engine):
            points.append(np.concatenate([binaries[0], values[: inst.n], binaries[1], values[inst.n :]]))
    dimension = polyhedron_dimension(inst, space)
    rank = affine_rank(np.asarray(points)) if points else 0
    return FacetCheck(rank=rank, dimension=dimension, confirmed=rank >= dimension, points=len(points))
