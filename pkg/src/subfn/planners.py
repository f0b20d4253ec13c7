"""Query planners: greedy and exact minimizers of (expected) divergence.

Offline planners estimate the expected divergence of a candidate reveal set
with a fixed panel of sampled functions (common random numbers: the same
kappa samples, indices 0..kappa-1 of the distribution, are reused across all
candidates and steps). Oracle planners score candidates against the true
function directly. Ties always break toward the smallest subset id, and an
exact search breaks ties toward the lexicographically smallest query list.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import FunctionClass, GroundSet, SetFunction, minimal_information
from .divergence import divergence_matrix
from .distributions import PURPOSE_PLAN, DistributionSpec, rng_for, sample_matrix
from .errors import TooLarge

MAX_OPTIMAL_CANDIDATES = 10 ** 8
_CHUNK = 2048


def worker_count() -> int:
    """Parallelism cap from SUBFN_THREADS (default 1: fully sequential)."""
    try:
        return max(1, int(os.environ.get("SUBFN_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class PlanConfig:
    """Budget, sample count, class, norm, and seed for a planning run."""

    t: int
    kappa: int = 90
    function_class: FunctionClass = field(default_factory=lambda: FunctionClass("S"))
    norm: str = "l1"
    seed: int = 0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("budget t must be nonnegative")
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")
        object.__setattr__(self, "function_class", FunctionClass.of(self.function_class))


@dataclass(frozen=True)
class PlanResult:
    """Ordered queries plus the (estimated) divergence after 0..t reveals."""

    queries: list
    step_divergence: list
    samples_used: int


class _Session:
    """One planning problem: a value panel sharing a mask structure."""

    def __init__(self, n: int, matrix: np.ndarray, cfg: PlanConfig):
        self.n = n
        self.matrix = matrix
        self.cfg = cfg
        ground = GroundSet(n)
        base = minimal_information(ground)
        self.base_ids = base.ids()
        self.unknown = [s for s in ground.subsets() if s not in base]
        if cfg.t > len(self.unknown):
            raise ValueError(
                f"budget {cfg.t} exceeds the {len(self.unknown)} unknown subsets"
            )

    def estimate(self, extra: tuple) -> float:
        ids = self.base_ids + list(extra)
        vec = divergence_matrix(self.n, ids, self.matrix, self.cfg.function_class, self.cfg.norm)
        return float(np.mean(vec))

    def estimate_many(self, extras: list) -> list:
        threads = worker_count()
        if threads > 1 and len(extras) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(self.estimate, extras))
        return [self.estimate(e) for e in extras]


def _greedy(session: _Session, t: int, samples_used: int) -> PlanResult:
    chosen: list[int] = []
    steps = [session.estimate(())]
    for _ in range(t):
        candidates = [s for s in session.unknown if s not in chosen]
        scores = session.estimate_many([tuple(chosen) + (s,) for s in candidates])
        best_idx = 0
        for i in range(1, len(scores)):
            if scores[i] < scores[best_idx]:
                best_idx = i
        chosen.append(candidates[best_idx])
        steps.append(scores[best_idx])
    return PlanResult(chosen, steps, samples_used)


def _optimal(session: _Session, t: int, samples_used: int, max_candidates: int) -> PlanResult:
    total = math.comb(len(session.unknown), t)
    if total > max_candidates:
        raise TooLarge(
            f"{total} candidate reveal sets exceed the cap of {max_candidates}"
        )
    best_combo: Optional[tuple] = None
    best_val = np.inf
    combos = itertools.combinations(session.unknown, t)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        for combo, val in zip(chunk, session.estimate_many(chunk)):
            if val < best_val:
                best_combo, best_val = combo, val
    assert best_combo is not None

    # Greedy-order the chosen set so the step curve is displayable.
    pool = sorted(best_combo)
    prefix: list[int] = []
    steps = [session.estimate(())]
    while pool:
        scores = session.estimate_many([tuple(prefix) + (q,) for q in pool])
        best_idx = 0
        for i in range(1, len(scores)):
            if scores[i] < scores[best_idx]:
                best_idx = i
        prefix.append(pool.pop(best_idx))
        steps.append(scores[best_idx])
    return PlanResult(prefix, steps, samples_used)


def _offline_session(dist: DistributionSpec, cfg: PlanConfig) -> _Session:
    matrix = sample_matrix(dist, 0, cfg.kappa)
    return _Session(dist.n, matrix, cfg)


def _oracle_session(f: SetFunction, cfg: PlanConfig) -> _Session:
    return _Session(f.n, f.values[:, None], cfg)


def offline_greedy(dist: DistributionSpec, cfg: PlanConfig) -> PlanResult:
    """Greedy minimizer of the kappa-sample mean divergence, one query at a time."""
    return _greedy(_offline_session(dist, cfg), cfg.t, cfg.kappa)


def offline_optimal(
    dist: DistributionSpec, cfg: PlanConfig, max_candidates: int = MAX_OPTIMAL_CANDIDATES
) -> PlanResult:
    """Exact minimizer of the kappa-sample mean divergence over all size-t reveal sets."""
    return _optimal(_offline_session(dist, cfg), cfg.t, cfg.kappa, max_candidates)


def oracle_greedy(f: SetFunction, cfg: PlanConfig) -> PlanResult:
    """Greedy minimizer of the true divergence of a fully known function."""
    return _greedy(_oracle_session(f, cfg), cfg.t, 0)


def oracle_optimal(
    f: SetFunction, cfg: PlanConfig, max_candidates: int = MAX_OPTIMAL_CANDIDATES
) -> PlanResult:
    """Exact minimizer of the true divergence over all size-t reveal sets."""
    return _optimal(_oracle_session(f, cfg), cfg.t, 0, max_candidates)


def random_plan(dist_or_f, cfg: PlanConfig) -> PlanResult:
    """Uniformly random distinct queries; divergence reported like the peers.

    With a distribution the step divergences are kappa-sample means; with a
    set function they are exact.
    """
    if isinstance(dist_or_f, SetFunction):
        session = _oracle_session(dist_or_f, cfg)
        samples_used = 0
    else:
        session = _offline_session(dist_or_f, cfg)
        samples_used = cfg.kappa
    rng = rng_for(cfg.seed, 0, PURPOSE_PLAN)
    order = rng.permutation(len(session.unknown))
    queries = [session.unknown[int(i)] for i in order[: cfg.t]]
    steps = [session.estimate(tuple(queries[:k])) for k in range(cfg.t + 1)]
    return PlanResult(queries, steps, samples_used)
