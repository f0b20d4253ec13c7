"""Ground-set algebra, set-function storage, masks, normalization, class checks.

Subsets of the ground set are encoded as integer bitmasks: bit i set means
element i belongs to the subset. The bitmask doubles as the index into the
dense value table of a set function, and lexicographic order on the integer
is the global tie-breaking order wherever an argmin is ambiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DegenerateNormalization,
    InconsistentValues,
    NotSymmetric,
    UnknownValue,
)

DEFAULT_TOL = 1e-9

CLASS_TAGS = ("S", "SAM", "XOS", "SS", "CA")


def popcount(mask: int) -> int:
    return mask.bit_count()


def iter_submasks(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask`` (including 0 and ``mask`` itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def elements(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True)
class GroundSet:
    """The n elements whose subsets are valued; 1 <= n <= 16."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= 16:
            raise ValueError(f"ground set size must be in [1, 16], got {self.n}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        return 1 << self.n

    def subsets(self) -> range:
        return range(1 << self.n)

    def singletons(self) -> list[int]:
        return [1 << i for i in range(self.n)]


@dataclass(frozen=True)
class SetFunction:
    """Dense table of 2^n values, indexed by subset bitmask."""

    ground: GroundSet
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.ground.size,):
            raise ValueError(
                f"expected {self.ground.size} values for n={self.ground.n}, "
                f"got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, n: int, values) -> "SetFunction":
        return cls(GroundSet(n), np.asarray(values, dtype=np.float64))

    @classmethod
    def from_callable(cls, n: int, fn) -> "SetFunction":
        return cls.of(n, [fn(s) for s in range(1 << n)])

    @property
    def n(self) -> int:
        return self.ground.n

    def __getitem__(self, subset: int) -> float:
        return float(self.values[subset])

    def to_json_dict(self) -> dict:
        return {"n": self.n, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SetFunction":
        return cls.of(int(data["n"]), data["values"])


@dataclass(frozen=True)
class KnownMask:
    """The set of subsets whose values are observable.

    The minimal information (empty set, ground set, all singletons) is always
    included, so constructing a mask from any collection of extra subsets is
    safe.
    """

    ground: GroundSet
    known: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        base = {0, self.ground.full} | set(self.ground.singletons())
        extra = set(self.known)
        for s in extra:
            if not 0 <= s <= self.ground.full:
                raise ValueError(f"subset id {s} out of range for n={self.ground.n}")
        object.__setattr__(self, "known", frozenset(base | extra))

    def __contains__(self, subset: int) -> bool:
        return subset in self.known

    def __len__(self) -> int:
        return len(self.known)

    def ids(self) -> list[int]:
        return sorted(self.known)

    def unknown_ids(self) -> list[int]:
        return [s for s in self.ground.subsets() if s not in self.known]

    def with_extra(self, extra: Iterable[int]) -> "KnownMask":
        return KnownMask(self.ground, self.known | set(extra))

    def to_json_dict(self) -> dict:
        return {"n": self.ground.n, "known": self.ids()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "KnownMask":
        return cls(GroundSet(int(data["n"])), frozenset(int(s) for s in data["known"]))


def minimal_information(ground: GroundSet) -> KnownMask:
    """Mask holding only the empty set, the ground set, and all singletons."""
    return KnownMask(ground, frozenset())


@dataclass(frozen=True)
class IncompleteSetFunction:
    """A set function paired with the mask of subsets whose values are visible."""

    fn: SetFunction
    mask: KnownMask

    def __post_init__(self):
        if self.fn.ground != self.mask.ground:
            raise ValueError("function and mask live on different ground sets")

    @property
    def ground(self) -> GroundSet:
        return self.fn.ground

    @property
    def n(self) -> int:
        return self.fn.n

    def value(self, subset: int) -> float:
        if subset not in self.mask:
            raise UnknownValue(f"value of subset {subset} is not in the mask")
        return self.fn[subset]

    def known_ids(self) -> list[int]:
        return self.mask.ids()

    def reveal(self, extra: Iterable[int]) -> "IncompleteSetFunction":
        return IncompleteSetFunction(self.fn, self.mask.with_extra(extra))


@dataclass(frozen=True)
class FunctionClass:
    """One of the five supported classes; CA carries its additive weights."""

    tag: str
    weights: tuple = ()

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.tag!r}; expected one of {CLASS_TAGS}")
        if self.tag == "CA":
            w = tuple(float(x) for x in self.weights)
            if not w:
                raise ValueError("CA requires a weight per ground-set element")
            if any(not np.isfinite(x) or x < 0 for x in w):
                raise ValueError("CA weights must be finite and nonnegative")
            object.__setattr__(self, "weights", w)
        else:
            object.__setattr__(self, "weights", ())

    @classmethod
    def of(cls, spec, weights=None) -> "FunctionClass":
        """Coerce a tag string (case-insensitive) or pass through an instance."""
        if isinstance(spec, FunctionClass):
            return spec
        tag = str(spec).upper()
        if tag == "CA":
            return cls("CA", tuple(weights or ()))
        return cls(tag)


def singleton_mass(n: int, per_element: Sequence[float]) -> np.ndarray:
    """Array m with m[S] = sum of per_element[i] over i in S, for all 2^n subsets."""
    out = np.zeros(1 << n)
    idx = np.arange(1 << n)
    for i in range(n):
        out[(idx >> i) & 1 == 1] += per_element[i]
    return out


def affine_transform(f: SetFunction, alpha: float, beta: Sequence[float]) -> SetFunction:
    """Return the set function S -> alpha * f(S) + sum_{i in S} beta[i]."""
    return SetFunction(f.ground, alpha * f.values + singleton_mass(f.n, beta))


def normalize(f: SetFunction) -> tuple[SetFunction, float, np.ndarray]:
    """Affinely rescale so singletons are 0 and the ground set is +/-1.

    Returns (g, alpha, beta) with g(S) = alpha * f(S) + sum_{i in S} beta_i,
    alpha = 1 / |f(N) - sum_i f({i})| and beta_i = -alpha * f({i}).
    """
    if abs(f[0]) > 1e-12:
        raise ValueError("normalize requires f(empty set) = 0")
    n = f.n
    gap = f[f.ground.full] - sum(f[1 << i] for i in range(n))
    if abs(gap) < 1e-12:
        raise DegenerateNormalization(
            "top value equals the singleton sum; the rescaling is undefined"
        )
    alpha = 1.0 / abs(gap)
    beta = np.array([-alpha * f[1 << i] for i in range(n)])
    return affine_transform(f, alpha, beta), alpha, beta


# ---------------------------------------------------------------------------
# class-membership checks


def _is_subadditive(values: np.ndarray, n: int, tol: float) -> bool:
    # every disjoint pair, empty sets included (forces f(empty) >= 0)
    for s in range(1 << n):
        comp = ((1 << n) - 1) & ~s
        fs = values[s]
        for t in iter_submasks(comp):
            if fs + values[t] < values[s | t] - tol:
                return False
    return True


def _is_monotone(values: np.ndarray, n: int, tol: float) -> bool:
    for s in range(1 << n):
        for i in range(n):
            if not s >> i & 1 and values[s] > values[s | 1 << i] + tol:
                return False
    return True


def _is_fractionally_subadditive(values: np.ndarray, n: int, tol: float) -> bool:
    # Cover LPs below are unbounded as soon as any candidate cost is negative,
    # so negative values fail immediately; the empty set must sit at 0.
    from .lp import CoverInstance, min_fractional_cover

    if np.any(values < -tol) or abs(values[0]) > tol:
        return False
    for s in range(1, 1 << n):
        candidates = [(t, float(values[t])) for t in range(1, 1 << n) if t & s]
        opt = min_fractional_cover(CoverInstance(s, candidates))
        if opt.objective < values[s] - max(tol, 1e-6 * abs(values[s])):
            return False
    return True


def _symmetric_profile(values: np.ndarray, n: int, tol: float) -> np.ndarray | None:
    """Per-cardinality values if f depends only on |S| (within tol), else None."""
    prof = np.empty(n + 1)
    for s in range(n + 1):
        ids = [m for m in range(1 << n) if popcount(m) == s]
        vals = values[ids]
        if vals.max() - vals.min() > tol:
            return None
        prof[s] = vals[0]
    return prof


def _concave_monotone_points(xs: np.ndarray, ys: np.ndarray, tol: float) -> bool:
    """Do the points (xs ascending, distinct) admit a nondecreasing concave curve?"""
    if np.any(np.diff(ys) < -tol):
        return False
    slopes = np.diff(ys) / np.diff(xs)
    return not np.any(np.diff(slopes) > tol)


def _distinct_levels(xs: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group indices of xs by value, merging points closer than tol."""
    order = np.argsort(xs, kind="stable")
    groups: list[list[int]] = []
    for idx in order:
        if groups and xs[idx] - xs[groups[-1][0]] <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return [np.array(g) for g in groups]


def check_class(f: SetFunction, function_class, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``f`` satisfies the definition of the given class.

    S checks all disjoint-pair constraints; SAM adds monotonicity; XOS checks
    fractional subadditivity (one cover LP per subset, so keep n <= 10);
    SS/CA check that the induced one-dimensional profile is nondecreasing and
    concave.
    """
    cls = FunctionClass.of(function_class)
    n = f.n
    values = f.values
    if cls.tag == "S":
        return _is_subadditive(values, n, tol)
    if cls.tag == "SAM":
        return _is_subadditive(values, n, tol) and _is_monotone(values, n, tol)
    if cls.tag == "XOS":
        return _is_fractionally_subadditive(values, n, tol)
    if cls.tag == "SS":
        prof = _symmetric_profile(values, n, tol)
        if prof is None:
            return False
        return _concave_monotone_points(np.arange(n + 1, dtype=float), prof, tol)
    # CA: f must factor through the additive weight of each subset.
    if len(cls.weights) != n:
        raise ValueError("CA check needs one weight per element")
    xs = singleton_mass(n, cls.weights)
    levels = _distinct_levels(xs, tol)
    level_x, level_y = [], []
    for ids in levels:
        vals = values[ids]
        if vals.max() - vals.min() > tol:
            return False
        level_x.append(xs[ids[0]])
        level_y.append(vals[0])
    if len(level_x) == 1:
        return True
    return _concave_monotone_points(np.array(level_x), np.array(level_y), tol)


def symmetric_profile_or_raise(
    fn_values: np.ndarray, known_ids: Sequence[int], n: int, tol: float = DEFAULT_TOL
) -> dict[int, float]:
    """Known per-cardinality values; raises NotSymmetric on a disagreement."""
    prof: dict[int, float] = {}
    for s in known_ids:
        size = popcount(s)
        v = float(fn_values[s])
        if size in prof:
            if abs(prof[size] - v) > tol:
                raise NotSymmetric(
                    f"known sets of size {size} disagree: {prof[size]} vs {v}"
                )
        else:
            prof[size] = v
    return prof


def grouped_weight_profile(
    fn_values: np.ndarray,
    known_ids: Sequence[int],
    xs: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Distinct known x-levels and their values; equal-x sets must agree."""
    ids = np.array(sorted(known_ids))
    groups = _distinct_levels(xs[ids], tol)
    level_x, level_y = [], []
    for g in groups:
        gids = ids[g]
        vals = fn_values[gids]
        if vals.max() - vals.min() > tol:
            raise InconsistentValues(
                f"known sets with additive weight {xs[gids[0]]:.12g} disagree"
            )
        level_x.append(float(xs[gids[0]]))
        level_y.append(float(vals[0]))
    return np.array(level_x), np.array(level_y)


# ---------------------------------------------------------------------------
# file formats


def load_set_function(path) -> SetFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return SetFunction.from_json_dict(json.load(fh))


def save_set_function(f: SetFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(f.to_json_dict(), fh)


def load_mask(path) -> KnownMask:
    with open(path, "r", encoding="utf-8") as fh:
        return KnownMask.from_json_dict(json.load(fh))


def save_mask(mask: KnownMask, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mask.to_json_dict(), fh)
