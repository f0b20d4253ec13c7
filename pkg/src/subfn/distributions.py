"""Seeded priors over set functions for the desk-scale experiments.

Sampling is keyed by (seed, index) through a counter-based generator
(Philox), so sample i of a spec is the same bit pattern in every process and
samples for different indices come from disjoint streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import GroundSet, SetFunction, normalize, singleton_mass
from .errors import DegenerateNormalization

KINDS = ("convex", "xos6", "coverage", "kbudget", "pointmass")

# Disjoint Philox stream families; the index occupies a different counter
# word than the draw position, so streams never collide.
PURPOSE_SAMPLE = 0
PURPOSE_PLAN = 1
PURPOSE_EXTENSION = 2

_U64 = (1 << 64) - 1


def rng_for(seed: int, index: int, purpose: int = PURPOSE_SAMPLE) -> np.random.Generator:
    key = int(seed) & ((1 << 128) - 1)
    counter = [0, 0, int(index) & _U64, int(purpose) & _U64]
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


@dataclass
class DistributionSpec:
    """A named prior: kind, ground-set size, seed, and kind-specific params.

    Set ``normalize`` to rescale each sample so singletons sit at 0 and the
    ground set at +/-1; samples where that map is degenerate pass through
    unchanged.
    """

    kind: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)
    point: Optional[SetFunction] = None
    normalize: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "pointmass":
            if self.point is None:
                raise ValueError("pointmass needs the carried set function")
            if self.point.n != self.n:
                raise ValueError("pointmass function size disagrees with n")
        GroundSet(self.n)

    def to_json_dict(self) -> dict:
        data = {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "params": dict(self.params),
            "normalize": self.normalize,
        }
        if self.point is not None:
            data["point"] = self.point.to_json_dict()
        return data

    @classmethod
    def from_json_dict(cls, data: dict) -> "DistributionSpec":
        point = None
        if data.get("point") is not None:
            point = SetFunction.from_json_dict(data["point"])
        return cls(
            kind=data["kind"],
            n=int(data["n"]),
            seed=int(data.get("seed", 0)),
            params=dict(data.get("params", {})),
            point=point,
            normalize=bool(data.get("normalize", False)),
        )


def pointmass(f: SetFunction, normalize: bool = False) -> DistributionSpec:
    return DistributionSpec("pointmass", f.n, point=f, normalize=normalize)


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[(np.arange(1 << n) >> i) & 1 == 1] += 1
    return counts


def _sample_convex(n: int, rng: np.random.Generator) -> np.ndarray:
    # Nonnegative interaction mass on every subset of size >= 2 yields a
    # monotone supermodular function; its negation, rescaled to [-1, 0],
    # is a decreasing submodular (hence subadditive) function with
    # singletons at 0.
    weights = rng.random(1 << n)
    weights[_popcounts(n) < 2] = 0.0
    cumulative = weights.copy()
    idx = np.arange(1 << n)
    for i in range(n):
        sel = idx[(idx >> i) & 1 == 1]
        cumulative[sel] += cumulative[sel - (1 << i)]
    top = cumulative[-1]
    if top <= 0:
        return np.zeros(1 << n)
    return -cumulative / top


def _sample_xos6(n: int, rng: np.random.Generator, count: int) -> np.ndarray:
    tables = [singleton_mass(n, rng.random(n)) for _ in range(count)]
    return np.max(np.stack(tables), axis=0)


def _sample_coverage(n: int, rng: np.random.Generator, universe: int, inclusion_p: float) -> np.ndarray:
    member = rng.random((n, universe)) < inclusion_p
    element_masks = [
        sum(1 << e for e in range(universe) if member[i, e]) for i in range(n)
    ]
    union = [0] * (1 << n)
    values = np.zeros(1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        union[s] = union[s ^ low] | element_masks[low.bit_length() - 1]
        values[s] = union[s].bit_count()
    return values


def _sample_kbudget(n: int, rng: np.random.Generator) -> np.ndarray:
    k = int(rng.integers(1, n + 1))
    return np.minimum(k, _popcounts(n)).astype(float)


def sample(spec: DistributionSpec, index: int) -> SetFunction:
    """Draw sample ``index`` of the spec; a pure function of (spec, index)."""
    if spec.kind == "pointmass":
        fn = spec.point
    else:
        rng = rng_for(spec.seed, index, PURPOSE_SAMPLE)
        if spec.kind == "convex":
            values = _sample_convex(spec.n, rng)
        elif spec.kind == "xos6":
            values = _sample_xos6(spec.n, rng, int(spec.params.get("count", 6)))
        elif spec.kind == "coverage":
            values = _sample_coverage(
                spec.n,
                rng,
                int(spec.params.get("universe", 2 * spec.n)),
                float(spec.params.get("inclusion_p", 0.5)),
            )
        else:
            values = _sample_kbudget(spec.n, rng)
        fn = SetFunction.of(spec.n, values)
    if spec.normalize:
        try:
            fn = normalize(fn)[0]
        except DegenerateNormalization:
            pass
    return fn


def sample_matrix(spec: DistributionSpec, first: int, count: int) -> np.ndarray:
    """Value columns for samples first..first+count-1, shape (2^n, count)."""
    return np.column_stack([sample(spec, first + i).values for i in range(count)])
