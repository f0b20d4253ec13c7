"""Brute-force references for the bound computations, and extension search.

These deliberately avoid the dynamic programs and the simplex solver: the
partition and cover references are plain recursions over the known sets, the
LP reference enumerates dual vertices, and the extension sampler builds a
concrete class member one coordinate at a time. They exist so every derived
number in the test suite can be recomputed by an independent route.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .completions import bounds_for, s_bounds
from .core import (
    FunctionClass,
    IncompleteSetFunction,
    KnownMask,
    SetFunction,
    check_class,
    elements,
)
from .distributions import PURPOSE_EXTENSION, rng_for
from .errors import (
    ExtensionNotFound,
    InconsistentValues,
    NegativeValues,
    NotExtendable,
    NotSymmetric,
    TooLarge,
    Unbounded,
)
from .lp import CoverInstance


def brute_partition_upper(g: IncompleteSetFunction, subset: int) -> float:
    """Minimum known-set partition cost of ``subset`` by full enumeration."""
    if g.n > 6:
        raise TooLarge("partition enumeration is limited to n <= 6")
    known = [(t, g.fn[t]) for t in g.known_ids() if t != 0]

    def best(rem: int) -> float:
        if rem == 0:
            return 0.0
        low = rem & -rem
        out = math.inf
        for t, cost in known:
            if t & low and t & rem == t:
                out = min(out, cost + best(rem ^ t))
        return out

    return best(subset)


def brute_cover_upper(g: IncompleteSetFunction, subset: int) -> float:
    """Minimum known-set cover cost of ``subset`` by full enumeration.

    Each known set is used at most once, which is enough when values are
    nonnegative; negative known values are rejected.
    """
    if g.n > 5:
        raise TooLarge("cover enumeration is limited to n <= 5")
    known = [(t, g.fn[t]) for t in g.known_ids() if t != 0]
    if any(cost < -1e-9 for _, cost in known):
        raise NegativeValues("cover enumeration requires nonnegative known values")

    def best(rem: int) -> float:
        if rem == 0:
            return 0.0
        low = rem & -rem
        out = math.inf
        for t, cost in known:
            if t & low:
                out = min(out, cost + best(rem & ~t))
        return out

    return best(subset)


def brute_s_lower(g: IncompleteSetFunction, subset: int) -> float:
    """Direct evaluation of the subadditive lower formula with brute uppers."""
    out = -math.inf
    for t in g.known_ids():
        if t & subset == subset:
            out = max(out, g.fn[t] - brute_partition_upper(g, t ^ subset))
    return out


def brute_sam_lower(g: IncompleteSetFunction, subset: int) -> float:
    """Direct evaluation of the monotone lower formula with brute uppers."""
    out = -math.inf
    for y in g.known_ids():
        if y & subset == y:
            out = max(out, g.fn[y])
    for x in g.known_ids():
        if x & subset == subset:
            out = max(out, g.fn[x] - brute_cover_upper(g, x ^ subset))
    return out


def enumerate_cover_optimum(instance: CoverInstance, tol: float = 1e-7) -> float:
    """Fractional-cover optimum via vertex enumeration of the dual polytope.

    The dual maximizes the sum of one variable per element subject to one
    constraint per candidate; every vertex is the solution of |S| active
    constraints. Intended for |S| <= 4.
    """
    target = instance.elements
    if target == 0:
        return 0.0
    elems = elements(target)
    k = len(elems)
    if k > 4:
        raise TooLarge("dual vertex enumeration is limited to 4 elements")
    costs = np.array([float(c) for _, c in instance.candidates])
    if np.any(costs < -1e-9):
        raise Unbounded("negative-cost candidate; the cover LP is unbounded")
    costs = np.maximum(costs, 0.0)
    rows = []
    rhs = []
    for (t, _), c in zip(instance.candidates, costs):
        row = np.array([1.0 if t >> j & 1 else 0.0 for j in elems])
        if row.any():
            rows.append(row)
            rhs.append(c)
    m = len(rows)
    a = np.array(rows) if m else np.zeros((0, k))
    b = np.array(rhs)

    best = -math.inf
    for combo in itertools.combinations(range(m + k), k):
        eq = np.zeros((k, k))
        val = np.zeros(k)
        for pos, c in enumerate(combo):
            if c < m:
                eq[pos] = a[c]
                val[pos] = b[c]
            else:
                eq[pos, c - m] = 1.0
        try:
            y = np.linalg.solve(eq, val)
        except np.linalg.LinAlgError:
            continue
        if np.any(y < -tol):
            continue
        if m and np.any(a @ y > b + tol):
            continue
        best = max(best, float(y.sum()))
    if best == -math.inf:
        raise Unbounded("dual polytope has no vertex; the cover LP is infeasible")
    return best


@dataclass(frozen=True)
class ExtensionSample:
    """A verified class member agreeing with the input on its mask."""

    fn: SetFunction
    function_class: FunctionClass


def sample_extension(
    g: IncompleteSetFunction,
    function_class,
    seed: int = 0,
    restarts: int = 50,
    pin: dict | None = None,
    tol: float = 1e-6,
) -> ExtensionSample:
    """Draw one class extension by fixing unknown values coordinate by coordinate.

    Visits the unknown subsets in random order; each value is drawn uniformly
    from the feasible interval the class bounds report for the mask grown so
    far. ``pin`` forces chosen coordinates to exact values first (used to
    certify that a bound is attained).

    Where both bounds are tight the reported interval is the exact projection
    of the extension set and the first attempt succeeds; where the lower is
    merely valid (the fractional-cover class), a low draw can strand the
    walk, so later restarts shrink the draw toward the upper end, which is
    tight and therefore always completable. Raises ExtensionNotFound when no
    verified extension emerges within ``restarts`` attempts.
    """
    if g.n > 5:
        raise TooLarge("extension sampling is limited to n <= 5")
    cls = FunctionClass.of(function_class)
    base_unknown = g.mask.unknown_ids()
    pin = dict(pin or {})
    for s in pin:
        if s in g.mask:
            raise ValueError(f"cannot pin already-known subset {s}")

    for attempt in range(restarts):
        rng = rng_for(seed, attempt, PURPOSE_EXTENSION)
        bias = attempt / max(1, restarts - 1)
        values = g.fn.values.copy()
        known = set(g.known_ids())
        for s, v in pin.items():
            values[s] = v
            known.add(s)
        order = [s for s in base_unknown if s not in pin]
        rng.shuffle(order)
        feasible = True
        for s in order:
            work = IncompleteSetFunction(
                SetFunction(g.ground, values), KnownMask(g.ground, frozenset(known))
            )
            try:
                bounds = bounds_for(work, cls)
            except (NotExtendable, NotSymmetric, InconsistentValues, Unbounded):
                feasible = False
                break
            lo, up = bounds.lower[s], bounds.upper[s]
            if up < lo:
                if lo - up > tol:
                    feasible = False
                    break
                lo = up = 0.5 * (lo + up)
            values[s] = lo + (bias + (1.0 - bias) * rng.random()) * (up - lo)
            known.add(s)
        if not feasible:
            continue
        candidate = SetFunction(g.ground, values)
        if check_class(candidate, cls, tol=tol):
            return ExtensionSample(candidate, cls)
    raise ExtensionNotFound(
        f"no verified extension after {restarts} restarts; the instance may "
        "not be extendable (or a pinned value is outside its bound)"
    )


def construct_s_tight_extension(g: IncompleteSetFunction, subset: int) -> SetFunction:
    """The case-split extension witnessing subadditive tightness at ``subset``.

    Takes the lower-bound value on every superset of ``subset`` and the
    upper-bound value elsewhere; the result is itself a subadditive extension
    that attains the lower bound at ``subset``. Using the full ground set as
    ``subset`` yields an extension attaining the upper bound everywhere else.
    """
    bounds = s_bounds(g)
    values = np.where(
        np.array([s & subset == subset for s in g.ground.subsets()]),
        bounds.lower.values,
        bounds.upper.values,
    )
    return SetFunction(g.ground, values)
