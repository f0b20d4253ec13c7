"""Tight lower/upper completions of an incomplete set function, per class.

Every public operation accepts an IncompleteSetFunction and returns a Bounds
pair whose entries agree with the input on the mask verbatim. The kernels
operate on a (2^n, m) value matrix so that bounds for m functions sharing a
mask are computed in one pass; the planners lean on this heavily.

Only masked coordinates of the input values are ever read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    DEFAULT_TOL,
    FunctionClass,
    IncompleteSetFunction,
    SetFunction,
    singleton_mass,
)
from .errors import InconsistentValues, NotExtendable, NotSymmetric, Unbounded
from .lp import CoverInstance, min_fractional_cover


@dataclass(frozen=True)
class Bounds:
    """Pointwise envelope of all class extensions of an incomplete function."""

    lower: SetFunction
    upper: SetFunction
    function_class: FunctionClass


# ---------------------------------------------------------------------------
# cached subset combinatorics


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[(np.arange(1 << n) >> i) & 1 == 1] += 1
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=None)
def _by_cardinality(n: int) -> np.ndarray:
    order = np.argsort(_popcounts(n), kind="stable")
    order.setflags(write=False)
    return order


@lru_cache(maxsize=None)
def _split_pairs(n: int):
    """Per subset S: arrays (T, S\\T) over proper two-part splits of S.

    The lowest set bit of S stays in T, halving the enumeration.
    """
    pairs = []
    for s in range(1 << n):
        low = s & -s
        rest = s ^ low
        ts, cs = [], []
        x = rest
        while True:
            if x != rest:
                t = low | x
                ts.append(t)
                cs.append(s ^ t)
            if x == 0:
                break
            x = (x - 1) & rest
        pairs.append((np.array(ts, dtype=np.int64), np.array(cs, dtype=np.int64)))
    return pairs


# ---------------------------------------------------------------------------
# batched kernels (values: float matrix of shape (2^n, m))


def _s_upper(n: int, known: set, values: np.ndarray) -> np.ndarray:
    splits = _split_pairs(n)
    upper = np.empty_like(values)
    upper[0] = values[0]
    for s in _by_cardinality(n):
        s = int(s)
        if s == 0:
            continue
        if s in known:
            upper[s] = values[s]
        else:
            ts, cs = splits[s]
            if ts.size == 0:
                raise NotExtendable(f"subset {s} cannot be partitioned into known sets")
            upper[s] = np.min(upper[ts] + upper[cs], axis=0)
    return upper


def _superset_terms(n: int, known_ids, values, upper) -> np.ndarray:
    """max over known X >= S of f(X) - upper(X \\ S), computed for every S."""
    out = np.full_like(values, -np.inf)
    for s in range(1 << n):
        xs = [x for x in known_ids if x & s == s]
        out[s] = np.max(values[xs] - upper[[x ^ s for x in xs]], axis=0)
    return out


def _s_lower(n: int, known: set, known_ids, values, upper) -> np.ndarray:
    lower = _superset_terms(n, known_ids, values, upper)
    for s in known:
        lower[s] = values[s]
    return lower


def _sam_upper(n: int, known: set, known_ids, values: np.ndarray) -> np.ndarray:
    upper = np.empty_like(values)
    upper[0] = 0.0  # cover recursion bottoms out at zero cost
    for s in _by_cardinality(n):
        s = int(s)
        if s == 0:
            continue
        if s in known:
            upper[s] = values[s]
        else:
            ts = [t for t in known_ids if t & s]
            rests = [s & ~t for t in ts]
            upper[s] = np.min(values[ts] + upper[rests], axis=0)
    upper[0] = values[0]
    return upper


def _sam_lower(n: int, known: set, known_ids, values, upper) -> np.ndarray:
    lower = _superset_terms(n, known_ids, values, upper)
    for s in range(1 << n):
        if s in known:
            lower[s] = values[s]
        else:
            subs = [y for y in known_ids if y & s == y]
            np.maximum(lower[s], np.max(values[subs], axis=0), out=lower[s])
    return lower


def _check_envelope(lower: np.ndarray, upper: np.ndarray, tol: float = DEFAULT_TOL):
    gap = lower - upper
    if np.max(gap) > tol:
        worst = int(np.unravel_index(np.argmax(gap), gap.shape)[0])
        raise NotExtendable(
            f"lower bound exceeds upper bound at subset {worst}; "
            "the masked values admit no extension in this class"
        )


def _require_nonnegative_known(known_ids, values, error, message):
    cols = values[known_ids]
    if np.any(cols < -DEFAULT_TOL):
        raise error(message)


# interpolation-based bounds shared by the cardinality and weighted variants


def _interp_bounds(
    coords: np.ndarray,
    level_x: np.ndarray,
    level_v: np.ndarray,
    known: set,
    values: np.ndarray,
    tol: float = DEFAULT_TOL,
):
    """Bounds from concavity+monotonicity of a profile sampled at level_x.

    ``coords`` maps every subset to its x-coordinate, ``level_v`` holds one
    value row per known level. The lower bound interpolates the neighbouring
    levels; the upper bound is the minimum of the two extrapolation lines
    (where two levels exist on that side) and the value at the nearest level
    above, which caps the extrapolation when only one side has two points.
    """
    if np.any(np.diff(level_v, axis=0) < -tol):
        raise NotExtendable("known values are not nondecreasing along the profile")
    if len(level_x) >= 3:
        slopes = np.diff(level_v, axis=0) / np.diff(level_x)[:, None]
        if np.any(np.diff(slopes, axis=0) > tol):
            raise NotExtendable("known values admit no concave profile")

    lower = np.empty_like(values)
    upper = np.empty_like(values)
    size = values.shape[0]
    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for s in range(size):
        if s in known:
            lower[s] = values[s]
            upper[s] = values[s]
            continue
        x = float(coords[s])
        if x in cache:
            lo_row, up_row = cache[x]
            lower[s], upper[s] = lo_row, up_row
            continue
        j = int(np.searchsorted(level_x, x))
        if j < len(level_x) and abs(level_x[j] - x) <= tol:
            lo_row = up_row = level_v[j]
        elif j > 0 and abs(level_x[j - 1] - x) <= tol:
            lo_row = up_row = level_v[j - 1]
        else:
            lo, hi = j - 1, j
            if lo < 0 or hi >= len(level_x):
                raise NotExtendable(
                    f"subset {s} lies outside the known profile range"
                )
            span = level_x[hi] - level_x[lo]
            lo_row = level_v[lo] + (x - level_x[lo]) * (level_v[hi] - level_v[lo]) / span
            terms = [level_v[hi]]
            if hi + 1 < len(level_x):
                run = level_x[hi + 1] - level_x[hi]
                terms.append(
                    level_v[hi] + (x - level_x[hi]) * (level_v[hi + 1] - level_v[hi]) / run
                )
            if lo >= 1:
                run = level_x[lo] - level_x[lo - 1]
                terms.append(
                    level_v[lo] + (x - level_x[lo]) * (level_v[lo] - level_v[lo - 1]) / run
                )
            up_row = terms[0]
            for t in terms[1:]:
                up_row = np.minimum(up_row, t)
        cache[x] = (lo_row, up_row)
        lower[s], upper[s] = lo_row, up_row
    return lower, upper


def _ss_matrices(n, known, known_ids, values, tol=DEFAULT_TOL):
    counts = _popcounts(n)
    sizes = sorted({int(counts[s]) for s in known_ids})
    level_rows = []
    for size in sizes:
        ids = [s for s in known_ids if counts[s] == size]
        block = values[ids]
        spread = block.max(axis=0) - block.min(axis=0)
        if np.any(spread > tol):
            raise NotSymmetric(
                f"known sets of size {size} disagree by up to {float(spread.max()):.3g}"
            )
        level_rows.append(values[ids[0]])
    level_x = np.array(sizes, dtype=float)
    level_v = np.stack(level_rows)
    return _interp_bounds(counts.astype(float), level_x, level_v, known, values, tol)


def _ca_matrices(n, known, known_ids, values, weights, tol=DEFAULT_TOL):
    xs = singleton_mass(n, weights)
    groups: list[list[int]] = []
    for s in sorted(known_ids, key=lambda s: xs[s]):
        if groups and xs[s] - xs[groups[-1][0]] <= tol:
            groups[-1].append(s)
        else:
            groups.append([s])
    level_x_list, level_rows = [], []
    for g in groups:
        block = values[g]
        spread = block.max(axis=0) - block.min(axis=0)
        if np.any(spread > tol):
            raise InconsistentValues(
                f"known sets with additive weight {xs[g[0]]:.12g} disagree "
                f"by up to {float(spread.max()):.3g}"
            )
        level_x_list.append(float(xs[g[0]]))
        level_rows.append(values[g[0]])
    level_x = np.array(level_x_list)
    level_v = np.stack(level_rows)
    return _interp_bounds(xs, level_x, level_v, known, values, tol)


def _xos_upper_column(n, known, known_ids, column) -> np.ndarray:
    _require_nonnegative_known(
        [s for s in known_ids if s != 0],
        column[:, None],
        Unbounded,
        "negative known values make the cover LP unbounded",
    )
    upper = np.empty_like(column)
    upper[0] = column[0]
    for s in range(1, len(column)):
        if s in known:
            upper[s] = column[s]
        else:
            cands = [(t, float(column[t])) for t in known_ids if t & s]
            upper[s] = min_fractional_cover(CoverInstance(s, cands)).objective
    return upper


# ---------------------------------------------------------------------------
# batched dispatcher used by divergence and the planners


def bounds_matrices(n: int, known_ids, values: np.ndarray, function_class) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) matrices for m functions sharing one mask.

    ``values`` has shape (2^n, m); unknown coordinates are never read.
    """
    cls = FunctionClass.of(function_class)
    known_ids = sorted(known_ids)
    known = set(known_ids)
    if cls.tag == "S":
        upper = _s_upper(n, known, values)
        lower = _s_lower(n, known, known_ids, values, upper)
    elif cls.tag == "SAM":
        _require_nonnegative_known(
            known_ids, values, NotExtendable,
            "monotone subadditive extensions are nonnegative, but a masked value is negative",
        )
        upper = _sam_upper(n, known, known_ids, values)
        lower = _sam_lower(n, known, known_ids, values, upper)
    elif cls.tag == "XOS":
        upper = np.empty_like(values)
        for col in range(values.shape[1]):
            upper[:, col] = _xos_upper_column(n, known, known_ids, values[:, col])
        lower = _sam_lower(n, known, known_ids, values, upper)
    elif cls.tag == "SS":
        lower, upper = _ss_matrices(n, known, known_ids, values)
    else:  # CA
        if len(cls.weights) != n:
            raise ValueError("CA bounds need one weight per element")
        lower, upper = _ca_matrices(n, known, known_ids, values, cls.weights)
    _check_envelope(lower, upper)
    return lower, upper


def _bounds_single(g: IncompleteSetFunction, function_class) -> Bounds:
    cls = FunctionClass.of(function_class)
    lower, upper = bounds_matrices(g.n, g.known_ids(), g.fn.values[:, None], cls)
    return Bounds(
        SetFunction(g.ground, lower[:, 0]),
        SetFunction(g.ground, upper[:, 0]),
        cls,
    )


# ---------------------------------------------------------------------------
# public per-class operations


def s_bounds(g: IncompleteSetFunction) -> Bounds:
    """Tight completion envelope under subadditivity alone.

    The upper bound is the cheapest partition of each subset into known sets;
    the lower bound is the best implied residual f(T) - upper(T \\ S) over
    known supersets T.
    """
    return _bounds_single(g, "S")


def sam_bounds(g: IncompleteSetFunction) -> Bounds:
    """Tight envelope under subadditivity plus monotonicity.

    The upper bound relaxes partitions to covers; the lower bound adds the
    best known subset value to the residual term.
    """
    return _bounds_single(g, "SAM")


def xos_bounds(g: IncompleteSetFunction) -> Bounds:
    """Tight envelope for fractionally subadditive functions.

    The upper bound solves one fractional-cover LP per unknown subset over
    the known sets meeting it; the lower bound reuses the monotone template
    with this tighter upper function. Known values must be nonnegative.
    """
    return _bounds_single(g, "XOS")


def ss_bounds(g: IncompleteSetFunction) -> Bounds:
    """Envelope for cardinality-symmetric functions with concave profiles."""
    return _bounds_single(g, "SS")


def ca_bounds(g: IncompleteSetFunction, weights) -> Bounds:
    """Envelope for concave transforms of a known additive weighting.

    Identical interpolation scheme as the cardinality-symmetric case, with
    subset size replaced by the additive weight of the subset.
    """
    return _bounds_single(g, FunctionClass.of("CA", weights))


def bounds_for(g: IncompleteSetFunction, function_class) -> Bounds:
    """Dispatch to the class-specific bounds."""
    return _bounds_single(g, function_class)


def _superset_min(n: int, arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    idx = np.arange(1 << n)
    for i in range(n):
        sel = idx[(idx >> i) & 1 == 0]
        out[sel] = np.minimum(out[sel], out[sel + (1 << i)])
    return out


def sam_upper_iterative(g: IncompleteSetFunction, max_steps: int, eps: float) -> SetFunction:
    """Iterative monotone-subadditive upper function (sound, not always tight).

    Seeds with the partition-based upper bound followed by a superset-min
    pass, then alternates a pairwise-split tightening with another monotone
    pass until the largest per-step change drops below ``eps`` or
    ``max_steps`` iterations have run. An infinite ``eps`` accepts the seed
    as already converged.
    """
    n = g.n
    known = set(g.known_ids())
    values = g.fn.values[:, None]
    seed = _superset_min(n, _s_upper(n, known, values)[:, 0])
    seed[0] = g.fn.values[0]
    if math.isinf(eps) or max_steps <= 0:
        return SetFunction(g.ground, seed)

    splits = _split_pairs(n)
    current = seed
    for _ in range(max_steps):
        refined = np.empty_like(current)
        refined[0] = current[0]
        for s in range(1, 1 << n):
            ts, cs = splits[s]
            best = current[0] + current[s]
            if ts.size:
                best = min(best, float(np.min(current[ts] + current[cs])))
            refined[s] = best
        nxt = _superset_min(n, refined)
        nxt[0] = current[0]
        change = float(np.max(np.abs(nxt - current)))
        current = nxt
        if change < eps:
            break
    return SetFunction(g.ground, current)
