"""
Separation routines for the cut families.

The mixing subproblems (pick T within the top-k set of a period to minimize
the mixing expression at a given z) are solved exactly by a dynamic program
over the sorted top-k positions: g(p) is the cheapest chain that starts at
position p and ends at the closing position k.
"""

import logging
from typing import Sequence

import numpy as np

from lotsizing.errors import CutSpecError
from lotsizing.formulations import ModelPoint
from lotsizing.instance import DemandStats

from .generators import ls_bigm_cut, mixing_cut, new_cut, stock_cut
from .models import Cut, MixingSet, NewCutSpec, violation_tolerance

logger = logging.getLogger(__name__)


def _chain_table(stats: DemandStats, i: int, zhat: Sequence[float]) -> tuple[np.ndarray, np.ndarray, list[float]]:
    k = stats.k
    order = stats.sigma_desc[i, : k + 1]
    demand = [stats.cum(int(j), i) for j in order]
    g = np.zeros(k + 1)
    successor = np.full(k + 1, k, dtype=int)
    for p in range(k - 1, -1, -1):
        weight = zhat[int(order[p])]
        best, best_q = np.inf, k
        for q in range(p + 1, k + 1):
            value = (demand[p] - demand[q]) * weight + g[q]
            if value < best - 1e-15:
                best, best_q = value, q
        g[p] = best
        successor[p] = best_q
    return g, successor, demand


def _chain(stats: DemandStats, i: int, start: int, successor: np.ndarray) -> tuple[int, ...]:
    k = stats.k
    members = []
    p = start
    while p < k:
        members.append(int(stats.sigma_desc[i, p]))
        p = int(successor[p])
    return tuple(members)


def separate_mixing_free(stats: DemandStats, i: int, zhat: Sequence[float], x_next: float) -> tuple[float, tuple[int, ...]]:
    """
    min over T within the top-k set of period i of
    -D[t(1), i] * x_next + sum_p (D[t(p), i] - D[t(p+1), i]) * zhat[t(p)].
    """
    g, successor, demand = _chain_table(stats, i, zhat)
    k = stats.k
    best, start = -demand[k] * x_next, k
    for p in range(k):
        value = -demand[p] * x_next + g[p]
        if value < best - 1e-15:
            best, start = value, p
    return float(best), _chain(stats, i, start, successor)


def separate_mixing_anchored(stats: DemandStats, i: int, zhat: Sequence[float]) -> tuple[float, tuple[int, ...]]:
    """As the free variant without the x term and with the top scenario of i forced into T."""
    if stats.k == 0:
        return 0.0, ()
    g, successor, _ = _chain_table(stats, i, zhat)
    return float(g[0]), _chain(stats, i, 0, successor)


def separate_mixing(stats: DemandStats, point: ModelPoint) -> list[Cut]:
    """Most violated mixing cut of every period, when violated."""
    cuts = []
    cum_y = np.cumsum(point.y)
    for ell in range(stats.n):
        value, T = separate_mixing_free(stats, ell, point.z, 1.0)
        if -value - cum_y[ell] <= 0.0:
            continue
        cut = mixing_cut(stats, MixingSet(ell=ell, T=T))
        if cut.is_violated(point):
            cuts.append(cut)
    return cuts


def separate_new(stats: DemandStats, point: ModelPoint) -> list[Cut]:
    """
    Hybrid cuts for every period ell >= 1. Period 0 always sits in S; period
    i joins S when y_i <= D_top(ell) * x_i + Y(i-1), otherwise it goes to S-bar
    with the set attaining Y(i-1). Exact when the top-k sets involved do not
    share scenarios, a heuristic otherwise.
    """
    free = {}
    for i in range(1, stats.n):
        free[i - 1] = separate_mixing_free(stats, i - 1, point.z, float(point.x[i]))
    cuts = []
    for ell in range(1, stats.n):
        d_top = stats.top(ell)
        S = [0]
        t_sets = {}
        for i in range(1, ell + 1):
            value, T = free[i - 1]
            if point.y[i] <= d_top * point.x[i] + value:
                S.append(i)
            else:
                t_sets[i - 1] = T
        _, top = separate_mixing_anchored(stats, ell, point.z)
        try:
            cut = new_cut(stats, NewCutSpec(ell=ell, S=tuple(S), t_sets=t_sets, top=top))
        except CutSpecError as exc:
            logger.debug("Skipping hybrid cut for period %d: %s", ell, exc)
            continue
        if cut.is_violated(point):
            cuts.append(cut)
    return cuts


def separate_stock(stats: DemandStats, point: ModelPoint) -> list[Cut]:
    """
    For every ell >= 1 and j the top scenario of ell-1, the stock cut with
    the anchored set of ell that minimizes the left-hand side.
    """
    if point.s is None:
        return []
    cuts = []
    for ell in range(1, stats.n):
        j = int(stats.sigma_desc[ell - 1, 0])
        value, T = separate_mixing_anchored(stats, ell, point.z)
        gap = stats.top(ell) - stats.cum(j, ell - 1)
        lhs = point.s[j, ell - 1] + gap * point.x[ell] + value
        if gap - lhs > violation_tolerance(gap):
            cuts.append(stock_cut(stats, ell, j, MixingSet(ell=ell, T=T)))
    return cuts


def separate_ls_bigm(stats: DemandStats, point: ModelPoint) -> list[Cut]:
    """Exact separation of the scenario-wise (l, S) cuts: i in S iff y_i <= D[j, i..ell] x_i."""
    cuts = []
    for j in range(stats.m):
        for ell in range(stats.n):
            total = stats.cum(j, ell)
            S = []
            lhs = total * point.z[j]
            for i in range(ell + 1):
                tail = total - stats.cum(j, i - 1)
                if point.y[i] <= tail * point.x[i]:
                    S.append(i)
                    lhs += point.y[i]
                else:
                    lhs += tail * point.x[i]
            if total - lhs > violation_tolerance(total):
                cuts.append(ls_bigm_cut(stats, j, ell, S))
    return cuts
