"""
Property suites behind `lotsizing verify`.

Each suite draws random instances, runs the brute-force oracle next to the
fast code path and stops at the first disagreement, returning the offending
instance as a counterexample.
"""

import itertools
import logging
import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field

from .benders import solve_benders, subproblem_dual, subproblem_lp
from .cuts.generators import dominance_holds, dominating_cut, mixing_cut, new_cut, stock_cut
from .cuts.models import Cut, MixingSet, NewCutSpec
from .cuts.separation import separate_ls_bigm, separate_mixing, separate_mixing_anchored, separate_mixing_free, separate_new, separate_stock
from .errors import CutSpecError, LotSizingError
from .formulations import ModelPoint, VarKind, build_compact, build_dep
from .instance import DemandStats, GeneratorConfig, Instance, demand_stats, generate
from .lp.backends.tableau import DenseTableauSimplex
from .methods import paired_root_gaps
from .oracle import Space, brute_force_optimum, brute_force_separation, hull_integrality_check, pattern_count, pattern_groups, tight_point_rank, validate_cut
from .solver import CutConfig, SolveStatus, solve

logger = logging.getLogger(__name__)

VALIDITY_DEMANDS = GeneratorConfig(d_range=(1, 20))
EQUIVALENCE_TOL = 1e-6
DOMINANCE_TOL = 1e-9
ROOT_GAP_TOL = 1e-6


class SuiteResult(BaseModel):
    suite: str
    passed: bool
    trials: int = Field(..., description="Trials actually run")
    checks: int = Field(0, description="Individual comparisons made")
    detail: str = ""
    counterexample: Optional[Instance] = None


def reference_instance() -> Instance:
    """Two periods, five scenarios, epsilon 0.4 (k = 2)."""
    return Instance(
        n=2,
        m=5,
        epsilon=0.4,
        f=(50.0, 50.0),
        c=(5.0, 5.0),
        h=(1.0, 1.0),
        d=((6.0, 1.0), (3.0, 6.0), (1.0, 10.0), (2.0, 8.0), (4.0, 5.0)),
    )


def random_instance(rng: np.random.Generator, max_n: int, max_m: int, max_k: int, config: Optional[GeneratorConfig] = None) -> Instance:
    """Random sizes within the limits; epsilon is picked so that floor(m * epsilon) hits the drawn k."""
    n = int(rng.integers(1, max_n, endpoint=True))
    m = int(rng.integers(2, max(2, max_m), endpoint=True))
    k = int(rng.integers(0, min(max_k, m - 1), endpoint=True))
    return generate(n, m, (k + 0.5) / m, int(rng.integers(0, 2**31 - 1)), config or VALIDITY_DEMANDS)


def disjoint_instance(rng: np.random.Generator, n: int, k: int, extra: int = 1) -> Instance:
    """
    Instance whose top-k sets of different periods share no scenario: group i
    receives a spike at period i large enough to dominate every earlier spike.
    """
    m = n * k + extra
    base = rng.integers(1, 20, size=(m, n), endpoint=True).astype(float)
    spike = 20.0 * n + 1.0
    for i in range(n):
        for j in range(i * k, (i + 1) * k):
            base[j, i] += spike * 2 ** (i + 1)
    return Instance(
        n=n,
        m=m,
        epsilon=(k + 0.5) / m,
        f=tuple(rng.integers(50, 100, size=n, endpoint=True).astype(float).tolist()),
        c=tuple(rng.integers(5, 10, size=n, endpoint=True).astype(float).tolist()),
        h=tuple(rng.integers(1, 5, size=n, endpoint=True).astype(float).tolist()),
        d=tuple(tuple(row) for row in base.tolist()),
    )


def random_point(rng: np.random.Generator, stats: DemandStats, with_s: bool = True) -> ModelPoint:
    s = rng.uniform(0.0, float(np.sum(stats.M)), size=(stats.m, stats.n)) if with_s else None
    return ModelPoint(
        x=rng.uniform(0.0, 1.0, size=stats.n),
        y=rng.uniform(0.0, 1.0, size=stats.n) * stats.M,
        z=rng.uniform(0.0, 1.0, size=stats.m),
        s=s,
    )


def _random_subset(rng: np.random.Generator, ordered: tuple[int, ...], anchored: bool) -> tuple[int, ...]:
    if not ordered:
        return ()
    keep = rng.random(len(ordered)) < 0.5
    if anchored:
        keep[0] = True
    return tuple(j for j, flag in zip(ordered, keep) if flag)


def random_cuts(rng: np.random.Generator, stats: DemandStats) -> list[Cut]:
    """One cut per generator from random legal parameters, where the instance allows it."""
    cuts = []
    ell = int(rng.integers(0, stats.n))
    cuts.append(mixing_cut(stats, MixingSet(ell=ell, T=_random_subset(rng, stats.top_set(ell), False))))
    if stats.n >= 2:
        ell = int(rng.integers(1, stats.n))
        S = (0,) + tuple(i for i in range(1, ell + 1) if rng.random() < 0.5)
        t_sets = {i - 1: _random_subset(rng, stats.top_set(i - 1), False) for i in range(1, ell + 1) if i not in S}
        top = _random_subset(rng, stats.top_set(ell), True)
        try:
            cuts.append(new_cut(stats, NewCutSpec(ell=ell, S=S, t_sets=t_sets, top=top)))
        except CutSpecError as exc:
            logger.debug("Random hybrid spec rejected: %s", exc)
        j = int(stats.sigma_desc[ell - 1, 0])
        try:
            cuts.append(stock_cut(stats, ell, j, MixingSet(ell=ell, T=_random_subset(rng, stats.top_set(ell), True))))
        except CutSpecError as exc:
            logger.debug("Random stock spec rejected: %s", exc)
    return cuts


def separated_cuts(stats: DemandStats, point: ModelPoint) -> list[Cut]:
    return separate_mixing(stats, point) + separate_new(stats, point) + separate_stock(stats, point) + separate_ls_bigm(stats, point)


def validity_suite(trials: int, seed: int = 0, max_n: int = 6, max_m: int = 12, max_k: int = 3) -> SuiteResult:
    """Every generated and separated cut is valid for P (P_plus for stock cuts)."""
    rng = np.random.default_rng(seed)
    engine = DenseTableauSimplex()
    checks = 0
    for trial in range(trials):
        inst = random_instance(rng, max_n, max_m, max_k)
        stats = demand_stats(inst)
        groups = pattern_groups(inst, stats)
        cuts = random_cuts(rng, stats) + separated_cuts(stats, random_point(rng, stats))
        for cut in cuts:
            space = Space.P_PLUS if VarKind.S in cut.kinds() else Space.P
            verdict = validate_cut(inst, cut, space, engine, groups)
            checks += 1
            if not verdict.valid:
                detail = f"{cut.family.value} cut {cut} has slack {verdict.worst_slack:.6g} at x={verdict.worst_x} z={verdict.worst_z}"
                return SuiteResult(suite="validity", passed=False, trials=trial + 1, checks=checks, detail=detail, counterexample=inst)
    return SuiteResult(suite="validity", passed=True, trials=trials, checks=checks)


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * (1.0 + abs(b))


def _exhaustive_new(stats: DemandStats, point: ModelPoint, ell: int) -> float:
    """Smallest lhs - rhs over every legal hybrid spec of period ell."""

    def subsets(ordered: tuple[int, ...], anchored: bool):
        if anchored and ordered:
            rest = ordered[1:]
            for size in range(len(rest) + 1):
                for combo in itertools.combinations(rest, size):
                    yield (ordered[0],) + combo
            return
        for size in range(len(ordered) + 1):
            yield from itertools.combinations(ordered, size)

    best = math.inf
    for size in range(ell + 1):
        for chosen in itertools.combinations(range(1, ell + 1), size):
            S = (0,) + chosen
            s_bar = [i for i in range(1, ell + 1) if i not in chosen]
            choices = [list(subsets(stats.top_set(i - 1), False)) for i in s_bar]
            for t_choice in itertools.product(*choices):
                t_sets = {i - 1: T for i, T in zip(s_bar, t_choice)}
                for top in subsets(stats.top_set(ell), True):
                    cut = new_cut(stats, NewCutSpec(ell=ell, S=S, t_sets=t_sets, top=top))
                    best = min(best, -cut.violation(point))
    return best


def separation_suite(trials: int, seed: int = 0, max_k: int = 12, max_m: int = 30, hybrid_trials: Optional[int] = None) -> SuiteResult:
    """
    Fast mixing separation (free and anchored) against subset enumeration, and
    hybrid separation against spec enumeration on instances with disjoint top-k sets.
    """
    rng = np.random.default_rng(seed)
    checks = 0
    for trial in range(trials):
        inst = random_instance(rng, 4, max_m, max_k)
        stats = demand_stats(inst)
        zhat = rng.uniform(0.0, 1.0, size=inst.m)
        i = int(rng.integers(0, inst.n))
        x_next = float(rng.uniform(0.0, 1.0))
        fast, _ = separate_mixing_free(stats, i, zhat, x_next)
        slow, _ = brute_force_separation(stats, i, zhat, anchored=False, x_next=x_next)
        checks += 1
        if not _close(fast, slow, 1e-9):
            return SuiteResult(suite="separation", passed=False, trials=trial + 1, checks=checks, detail=f"free variant at period {i}: {fast} vs {slow}", counterexample=inst)
        fast, _ = separate_mixing_anchored(stats, i, zhat)
        slow, _ = brute_force_separation(stats, i, zhat, anchored=True)
        checks += 1
        if not _close(fast, slow, 1e-9):
            return SuiteResult(suite="separation", passed=False, trials=trial + 1, checks=checks, detail=f"anchored variant at period {i}: {fast} vs {slow}", counterexample=inst)

    for trial in range(hybrid_trials if hybrid_trials is not None else max(1, trials // 20)):
        inst = disjoint_instance(rng, int(rng.integers(2, 4, endpoint=True)), int(rng.integers(1, 2, endpoint=True)))
        stats = demand_stats(inst)
        point = random_point(rng, stats, with_s=False)
        found = {cut.provenance.ell: -cut.violation(point) for cut in separate_new(stats, point)}
        for ell in range(1, inst.n):
            exhaustive = _exhaustive_new(stats, point, ell)
            checks += 1
            tol = 1e-6 * max(1.0, stats.top(ell))
            if exhaustive < -tol and not (ell in found and found[ell] <= exhaustive + tol):
                detail = f"hybrid separation at period {ell}: best slack {exhaustive:.6g}, separated {found.get(ell)}"
                return SuiteResult(suite="separation", passed=False, trials=trials, checks=checks, detail=detail, counterexample=inst)
    return SuiteResult(suite="separation", passed=True, trials=trials, checks=checks)


def hull_suite(trials: int, seed: int = 0, instances: int = 10, max_n: int = 4, max_m: int = 8) -> SuiteResult:
    """
    With every uncapacitated (l, S) cut the k = 0 relaxation is integral; without
    them some trial must come out fractional.
    """
    rng = np.random.default_rng(seed)
    fractional_without = 0
    checks = 0
    for _ in range(instances):
        inst = random_instance(rng, max_n, max_m, 0)
        trial_seed = int(rng.integers(0, 2**31 - 1))
        with_cuts = hull_integrality_check(inst, trials, trial_seed, with_cuts=True)
        checks += trials
        if not with_cuts.passed:
            detail = f"{with_cuts.fractional_trials} of {trials} trials fractional (worst {with_cuts.worst_fractionality:.3g})"
            return SuiteResult(suite="hull", passed=False, trials=trials, checks=checks, detail=detail, counterexample=inst)
        fractional_without += hull_integrality_check(inst, trials, trial_seed, with_cuts=False).fractional_trials
    if fractional_without == 0:
        return SuiteResult(suite="hull", passed=False, trials=trials, checks=checks, detail="big-M relaxation never came out fractional")
    return SuiteResult(suite="hull", passed=True, trials=trials, checks=checks, detail=f"{fractional_without} fractional trials without the cuts")


def facets_suite(trials: int = 6, seed: int = 0) -> SuiteResult:
    """Tight-point rank of the worked hybrid cut over P and the worked stock cut over P_plus."""
    inst = reference_instance()
    stats = demand_stats(inst)
    hybrid = new_cut(stats, NewCutSpec(ell=1, S=(0,), t_sets={0: (0, 4)}, top=(2, 3)))
    stock = stock_cut(stats, 1, 0, MixingSet(ell=1, T=(2, 3)))
    lines = []
    passed = True
    for cut, space in ((hybrid, Space.P), (stock, Space.P_PLUS)):
        check = tight_point_rank(inst, cut, sample_budget=trials, space=space, seed=seed)
        lines.append(f"{cut.family.value}: rank {check.rank} of {check.dimension} from {check.points} points")
        passed = passed and check.confirmed
    return SuiteResult(suite="facets", passed=passed, trials=trials, checks=2, detail="; ".join(lines), counterexample=None if passed else inst)


def equivalence_suite(trials: int, seed: int = 0, max_n: int = 8, max_m: int = 30, max_eps: float = 0.2, brute_force_limit: int = 20_000, time_limit: float = 120.0) -> SuiteResult:
    """DEP, compact and Benders optima agree; DEP matches brute force on small instances; closed-form duals match the LP."""
    rng = np.random.default_rng(seed)
    engine = DenseTableauSimplex()
    checks = 0
    cfg = CutConfig.from_names("mixing")
    for trial in range(trials):
        n = int(rng.integers(1, max_n, endpoint=True))
        m = int(rng.integers(2, max_m, endpoint=True))
        inst = generate(n, m, float(rng.uniform(0.0, max_eps)), int(rng.integers(0, 2**31 - 1)))

        for _ in range(5):
            yhat = rng.uniform(0.0, 1.0, size=n) * demand_stats(inst).M
            j = int(rng.integers(0, m))
            lp_value = engine.solve(subproblem_lp(inst, j, yhat)).objective
            checks += 1
            if not _close(subproblem_dual(inst, j, yhat).value, lp_value, 1e-9):
                return SuiteResult(suite="equivalence", passed=False, trials=trial + 1, checks=checks, detail=f"scenario {j} dual value differs from the LP", counterexample=inst)

        reports = {
            "dep": solve(build_dep(inst), cfg, time_limit),
            "compact": solve(build_compact(inst), cfg, time_limit),
            "benders": solve_benders(inst, cfg, time_limit),
        }
        if any(report.status != SolveStatus.OPTIMAL for report in reports.values()):
            logger.warning("Equivalence trial %d skipped: not every method finished", trial)
            continue
        values = {name: report.objective for name, report in reports.items()}
        if pattern_count(inst) <= brute_force_limit:
            values["brute-force"], _ = brute_force_optimum(inst, engine)
        reference = values["dep"]
        for name, value in values.items():
            checks += 1
            if not _close(value, reference, EQUIVALENCE_TOL):
                detail = ", ".join(f"{key}={val:.6f}" for key, val in values.items())
                return SuiteResult(suite="equivalence", passed=False, trials=trial + 1, checks=checks, detail=detail, counterexample=inst)
    return SuiteResult(suite="equivalence", passed=True, trials=trials, checks=checks)


def dominance_suite(trials: int, seed: int = 0, instances: int = 20, max_tries: int = 200) -> SuiteResult:
    """Where the dominance condition holds, the mixing cut is never tighter than its dominating cut."""
    rng = np.random.default_rng(seed)
    checks = 0
    found = 0
    for _ in range(max_tries):
        if found == instances:
            break
        inst = random_instance(rng, 6, 12, 3, GeneratorConfig())
        stats = demand_stats(inst)
        periods = [ell for ell in range(inst.n - 1) if dominance_holds(stats, ell)]
        if not periods:
            continue
        found += 1
        ell = periods[int(rng.integers(0, len(periods)))]
        T = _random_subset(rng, stats.top_set(ell), True)
        weak = mixing_cut(stats, MixingSet(ell=ell, T=T))
        strong = dominating_cut(stats, ell, T)
        for _ in range(trials):
            point = random_point(rng, stats, with_s=False)
            checks += 1
            difference = -weak.violation(point) + strong.violation(point)
            if difference < -DOMINANCE_TOL:
                return SuiteResult(suite="dominance", passed=False, trials=trials, checks=checks, detail=f"period {ell}, T={T}: slack difference {difference:.3g}", counterexample=inst)
    if found == 0:
        return SuiteResult(suite="dominance", passed=False, trials=trials, checks=0, detail="no instance satisfied the dominance condition")
    return SuiteResult(suite="dominance", passed=True, trials=trials, checks=checks, detail=f"{found} instances")


def rootgap_suite(trials: int, seed: int = 0, max_n: int = 5, max_m: int = 15, max_eps: float = 0.3, time_limit: float = 120.0) -> SuiteResult:
    """Adding new cuts on top of the same mixing pool never widens the root gap."""
    rng = np.random.default_rng(seed)
    checks = 0
    for trial in range(trials):
        n = int(rng.integers(1, max_n, endpoint=True))
        m = int(rng.integers(2, max_m, endpoint=True))
        inst = generate(n, m, float(rng.uniform(0.0, max_eps)), int(rng.integers(0, 2**31 - 1)))
        pair = paired_root_gaps(inst, time_limit=time_limit)
        if not pair.both_optimal:
            logger.warning("Root gap trial %d skipped: not both runs finished", trial)
            continue
        checks += 2
        if not _close(pair.paired_objective, pair.objective, EQUIVALENCE_TOL):
            return SuiteResult(suite="rootgap", passed=False, trials=trial + 1, checks=checks, detail=f"optimum {pair.paired_objective:.6f} with mixing+new, {pair.objective:.6f} with mixing", counterexample=inst)
        if pair.paired_gap_pct > pair.mixing_gap_pct + ROOT_GAP_TOL:
            return SuiteResult(suite="rootgap", passed=False, trials=trial + 1, checks=checks, detail=f"root gap {pair.paired_gap_pct:.6f}% with mixing+new above {pair.mixing_gap_pct:.6f}% with mixing", counterexample=inst)
    return SuiteResult(suite="rootgap", passed=True, trials=trials, checks=checks)


DEFAULT_TRIALS = {
    "validity": 200,
    "separation": 1000,
    "hull": 100,
    "facets": 6,
    "equivalence": 50,
    "dominance": 100,
    "rootgap": 20,
}

SUITES: dict[str, Callable[..., SuiteResult]] = {
    "validity": validity_suite,
    "separation": separation_suite,
    "hull": hull_suite,
    "facets": facets_suite,
    "equivalence": equivalence_suite,
    "dominance": dominance_suite,
    "rootgap": rootgap_suite,
}


def run_suite(name: str, trials: int, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    try:
        result = SUITES[name](trials, seed)
    except LotSizingError as exc:
        logger.error("Suite %s aborted: %s", name, exc)
        return SuiteResult(suite=name, passed=False, trials=0, detail=str(exc))
    logger.info("Suite %s %s after %d checks", name, "passed" if result.passed else "FAILED", result.checks)
    return result
