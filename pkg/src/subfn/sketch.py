"""Multiplicative-approximation quality of a bound pair (alpha ratios)."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .completions import bounds_for
from .core import GroundSet, IncompleteSetFunction, SetFunction, minimal_information
from .distributions import DistributionSpec, sample
from .errors import NegativeValues, Unbounded
from .planners import PlanConfig, offline_greedy

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class AlphaReport:
    """Worst multiplicative gap upper/lower, its witness subset, and how many
    zero/zero subsets were excluded from the ratio."""

    alpha: float
    witness: Optional[int]
    skipped: int


def alpha_ratio(lower: SetFunction, upper: SetFunction) -> AlphaReport:
    """max over subsets of upper(S)/lower(S), for nonnegative bound pairs.

    Subsets where both bounds are zero are skipped; a zero lower bound under
    a positive upper bound makes the ratio unbounded and raises.
    """
    lo = lower.values
    up = upper.values
    if np.any(lo < -1e-9) or np.any(up < -1e-9):
        raise NegativeValues("alpha ratios are defined for nonnegative bounds only")
    lo = np.maximum(lo, 0.0)
    up = np.maximum(up, 0.0)
    alpha, witness, skipped = 1.0, None, 0
    for s in range(lo.shape[0]):
        if lo[s] <= ZERO_TOL:
            if up[s] <= ZERO_TOL:
                skipped += 1
                continue
            raise Unbounded(
                f"subset {s} has zero lower bound but positive upper bound"
            )
        ratio = float(up[s] / lo[s])
        if ratio > alpha:
            alpha, witness = ratio, s
    return AlphaReport(alpha, witness, skipped)


def sketch_rows(
    dist: DistributionSpec,
    cfg: PlanConfig,
    budgets: list,
    samples: int = 50,
) -> list:
    """Alpha ratios of greedy-planned bound pairs at each budget.

    One greedy trajectory is planned at the largest budget (on the planning
    samples 0..kappa-1); each budget uses its prefix. Evaluation functions
    are fresh samples at indices kappa..kappa+samples-1, with their true
    values revealed on the trajectory prefix before bounding.
    """
    budgets = sorted(set(int(b) for b in budgets))
    plan = offline_greedy(dist, replace(cfg, t=max(budgets)))
    base = minimal_information(GroundSet(dist.n))
    masks = {b: base.with_extra(plan.queries[:b]) for b in budgets}
    rows = []
    for j in range(samples):
        fn = sample(dist, cfg.kappa + j)
        for budget in budgets:
            bounds = bounds_for(
                IncompleteSetFunction(fn, masks[budget]), cfg.function_class
            )
            report = alpha_ratio(bounds.lower, bounds.upper)
            rows.append(
                {
                    "distribution": dist.kind,
                    "n": dist.n,
                    "budget": budget,
                    "sample_index": cfg.kappa + j,
                    "alpha": report.alpha,
                    "witness": report.witness,
                }
            )
    return rows


def sketch_experiment(
    dist: DistributionSpec, cfg: PlanConfig, budget: int, samples: int = 50
) -> list:
    """Rows for a single budget; see sketch_rows."""
    return sketch_rows(dist, cfg, [budget], samples)


def mean_alpha(rows: list) -> dict:
    """Mean alpha per budget."""
    sums: dict[int, list] = {}
    for row in rows:
        sums.setdefault(row["budget"], []).append(row["alpha"])
    return {b: float(np.mean(v)) for b, v in sorted(sums.items())}
