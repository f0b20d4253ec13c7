"""Divergence of an incomplete set function, plus the supermodularity audit.

The divergence is a norm of the pointwise gap between the class upper and
lower completions. Its argument is the set of subsets revealed on top of the
minimal information; the audit checks whether, as a function of that set,
the L1 divergence is supermodular.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .completions import bounds_for, bounds_matrices
from .core import (
    DEFAULT_TOL,
    FunctionClass,
    IncompleteSetFunction,
    KnownMask,
    SetFunction,
    minimal_information,
)
from .errors import TooLarge

NORM_TAGS = ("l1", "l2", "linf")


def _norm_tag(norm) -> str:
    tag = str(norm).lower()
    if tag not in NORM_TAGS:
        raise ValueError(f"unknown norm {norm!r}; expected one of {NORM_TAGS}")
    return tag


def norm_values(gaps: np.ndarray, norm="l1") -> np.ndarray:
    """Apply an absolute norm along axis 0 of a (2^n, m) gap matrix."""
    tag = _norm_tag(norm)
    mags = np.abs(gaps)
    if tag == "l1":
        return mags.sum(axis=0)
    if tag == "l2":
        return np.sqrt((mags * mags).sum(axis=0))
    return mags.max(axis=0)


@dataclass(frozen=True)
class DivergenceReport:
    value: float
    per_set_gap: SetFunction


def divergence(g: IncompleteSetFunction, function_class, norm="l1") -> DivergenceReport:
    """Norm of (upper - lower) over all subsets; masked subsets contribute 0."""
    bounds = bounds_for(g, function_class)
    gap = bounds.upper.values - bounds.lower.values
    value = float(norm_values(gap[:, None], norm)[0])
    return DivergenceReport(value, SetFunction(g.ground, gap))


def divergence_matrix(n: int, known_ids, values: np.ndarray, function_class, norm="l1") -> np.ndarray:
    """Per-column divergences for m functions sharing one mask."""
    lower, upper = bounds_matrices(n, known_ids, values, function_class)
    return norm_values(upper - lower, norm)


@dataclass(frozen=True)
class SupermodularityViolation:
    """A reveal pattern where the marginal value of a query increased."""

    revealed: tuple
    first: int
    second: int
    deficit: float


def audit_divergence_supermodularity(
    f: SetFunction,
    function_class,
    mode: str = "exhaustive",
    players=None,
    tol: float = DEFAULT_TOL,
) -> list[SupermodularityViolation]:
    """Search for violations of supermodularity of the L1 class-divergence.

    Exhaustive mode iterates every base reveal set and unordered pair of
    additional queries (n <= 4 only). Targeted mode checks the single
    pattern where one pair {j,k} is already revealed and the queries are
    {i,j} and {k,l}, for the given players (i, j, k, l).
    """
    cls = FunctionClass.of(function_class)
    ground = f.ground
    n = ground.n
    base = minimal_information(ground)
    unknown = [s for s in ground.subsets() if s not in base]

    def delta_of(extra_ids) -> float:
        mask = KnownMask(ground, frozenset(extra_ids))
        return divergence(IncompleteSetFunction(f, mask), cls, "l1").value

    if mode == "targeted":
        if players is None or len(players) != 4:
            raise ValueError("targeted mode needs four distinct players (i, j, k, l)")
        i, j, k, l = players
        if len({i, j, k, l}) != 4:
            raise ValueError("targeted players must be distinct")
        khat = ((1 << j) | (1 << k),)
        first = (1 << i) | (1 << j)
        second = (1 << k) | (1 << l)
        lhs = delta_of(khat + (first, second)) - delta_of(khat + (first,))
        rhs = delta_of(khat + (second,)) - delta_of(khat)
        if lhs < rhs - tol:
            return [SupermodularityViolation(khat, first, second, rhs - lhs)]
        return []

    if mode != "exhaustive":
        raise ValueError(f"unknown audit mode {mode!r}")
    if n > 4:
        raise TooLarge("exhaustive supermodularity audit is limited to n <= 4")

    u = len(unknown)
    deltas = np.empty(1 << u)
    for bits in range(1 << u):
        extra = [unknown[p] for p in range(u) if bits >> p & 1]
        deltas[bits] = delta_of(extra)

    violations = []
    for p, q in itertools.combinations(range(u), 2):
        bp, bq = 1 << p, 1 << q
        rest = [r for r in range(u) if r not in (p, q)]
        for combo_bits in range(1 << len(rest)):
            khat_bits = 0
            for pos, r in enumerate(rest):
                if combo_bits >> pos & 1:
                    khat_bits |= 1 << r
            lhs = deltas[khat_bits | bp | bq] - deltas[khat_bits | bp]
            rhs = deltas[khat_bits | bq] - deltas[khat_bits]
            if lhs < rhs - tol:
                revealed = tuple(unknown[r] for r in range(u) if khat_bits >> r & 1)
                violations.append(
                    SupermodularityViolation(revealed, unknown[p], unknown[q], rhs - lhs)
                )
    violations.sort(key=lambda v: (v.revealed, v.first, v.second))
    return violations
