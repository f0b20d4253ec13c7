"""Small fractional set-cover LPs.

The primal problem is

    min sum_i alpha_i * cost(T_i)   s.t.  sum_{i : j in T_i} alpha_i >= 1
                                          for every element j of S, alpha >= 0.

We solve its dual (at most n variables, one constraint per candidate) with a
dense primal simplex using Bland's anti-cycling rule, and read the optimal
cover weights off the slack columns of the final tableau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import elements
from .errors import Infeasible, Unbounded

PIVOT_TOL = 1e-9
MAX_PIVOTS = 100_000


@dataclass(frozen=True)
class CoverInstance:
    """Elements to cover (a subset bitmask) and candidate sets with costs."""

    elements: int
    candidates: list

    def __post_init__(self):
        for t, cost in self.candidates:
            if not np.isfinite(cost):
                raise ValueError(f"candidate {t} has non-finite cost {cost}")


@dataclass(frozen=True)
class CoverSolution:
    """Optimal objective and the nonzero cover weights (candidate index, alpha)."""

    objective: float
    weights: list


def min_fractional_cover(instance: CoverInstance) -> CoverSolution:
    """Minimum-cost fractional cover of the instance's elements.

    Raises Infeasible if some element appears in no candidate, and Unbounded
    if a candidate has negative cost (any such candidate drives the objective
    to -infinity since the constraints are one-sided). Costs within PIVOT_TOL
    below zero are treated as float noise and read as zero.
    """
    target = instance.elements
    if target == 0:
        return CoverSolution(0.0, [])

    union = 0
    for t, _ in instance.candidates:
        union |= t
    if union & target != target:
        raise Infeasible(f"elements {target & ~union:#x} appear in no candidate")

    costs = np.array([float(c) for _, c in instance.candidates])
    if np.any(costs < -PIVOT_TOL):
        bad = int(np.argmin(costs))
        raise Unbounded(
            f"candidate {instance.candidates[bad][0]} has negative cost "
            f"{costs[bad]}; the cover LP is unbounded"
        )
    costs = np.maximum(costs, 0.0)

    elems = elements(target)
    k = len(elems)
    # Candidates disjoint from the target only add cost; drop them up front.
    active = [i for i, (t, _) in enumerate(instance.candidates) if t & target]
    m = len(active)

    tableau = np.zeros((m, k + m + 1))
    for row, i in enumerate(active):
        t = instance.candidates[i][0]
        for col, j in enumerate(elems):
            if t >> j & 1:
                tableau[row, col] = 1.0
        tableau[row, k + row] = 1.0
        tableau[row, -1] = costs[i]
    obj = np.zeros(k + m + 1)
    obj[:k] = -1.0  # maximize sum of dual variables

    basis = [k + row for row in range(m)]
    for _ in range(MAX_PIVOTS):
        enter = -1
        for j in range(k + m):
            if obj[j] < -PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            break
        leave, best_ratio = -1, np.inf
        for row in range(m):
            coef = tableau[row, enter]
            if coef > PIVOT_TOL:
                ratio = tableau[row, -1] / coef
                if ratio < best_ratio - PIVOT_TOL or (
                    abs(ratio - best_ratio) <= PIVOT_TOL
                    and (leave < 0 or basis[row] < basis[leave])
                ):
                    leave, best_ratio = row, ratio
        if leave < 0:
            # dual unbounded would mean the cover LP is infeasible, which the
            # union check above already excluded
            raise Infeasible("cover LP reported infeasible during the solve")
        pivot = tableau[leave, enter]
        tableau[leave] /= pivot
        for row in range(m):
            if row != leave and abs(tableau[row, enter]) > 0:
                tableau[row] -= tableau[row, enter] * tableau[leave]
        obj -= obj[enter] * tableau[leave]
        basis[leave] = enter
    else:
        raise RuntimeError("simplex failed to terminate")

    objective = float(obj[-1])
    weights = []
    for row, i in enumerate(active):
        alpha = float(obj[k + row])
        if alpha > 1e-12:
            weights.append((i, alpha))
    return CoverSolution(objective, weights)
