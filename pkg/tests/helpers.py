"""Shared instance generators for the test suite.

Everything is deterministic in the provided seed so failures reproduce.
"""

from __future__ import annotations

import numpy as np

from subfn.core import (
    FunctionClass,
    GroundSet,
    IncompleteSetFunction,
    KnownMask,
    SetFunction,
    minimal_information,
    popcount,
    singleton_mass,
)
from subfn.distributions import DistributionSpec, sample

CLASS_TAGS = ("S", "SAM", "XOS", "SS", "CA")


def ss_instance(n: int, seed: int) -> SetFunction:
    """Random cardinality-based function with a concave nondecreasing profile."""
    rng = np.random.default_rng((seed, 77, n))
    increments = np.sort(rng.random(n))[::-1]
    profile = np.concatenate([[0.0], np.cumsum(increments)])
    sizes = np.array([popcount(s) for s in range(1 << n)])
    return SetFunction.of(n, profile[sizes])


def ca_instance(n: int, seed: int) -> tuple[SetFunction, tuple]:
    """Random concave power of a random nonnegative additive weighting."""
    rng = np.random.default_rng((seed, 99, n))
    weights = tuple(float(w) for w in rng.random(n) * 2.0 + 0.05)
    exponent = 0.3 + 0.6 * rng.random()
    xs = singleton_mass(n, weights)
    return SetFunction.of(n, xs ** exponent), weights


def class_instance(tag: str, n: int, seed: int) -> tuple[SetFunction, FunctionClass]:
    """A full member of the class, plus the class descriptor to check it with."""
    if tag == "S":
        return sample(DistributionSpec("convex", n, seed=seed), 0), FunctionClass("S")
    if tag == "SAM":
        return sample(DistributionSpec("coverage", n, seed=seed), 0), FunctionClass("SAM")
    if tag == "XOS":
        return sample(DistributionSpec("xos6", n, seed=seed), 0), FunctionClass("XOS")
    if tag == "SS":
        return ss_instance(n, seed), FunctionClass("SS")
    if tag == "CA":
        fn, weights = ca_instance(n, seed)
        return fn, FunctionClass("CA", weights)
    raise ValueError(tag)


def random_mask(ground: GroundSet, seed: int, p: float = 0.4) -> KnownMask:
    rng = np.random.default_rng((seed, 13, ground.n))
    base = minimal_information(ground)
    extra = [s for s in ground.subsets() if s not in base and rng.random() < p]
    return KnownMask(ground, frozenset(extra))


def masked_instance(
    tag: str, n: int, seed: int, p: float = 0.4
) -> tuple[IncompleteSetFunction, FunctionClass, SetFunction]:
    fn, cls = class_instance(tag, n, seed)
    mask = random_mask(fn.ground, seed, p)
    return IncompleteSetFunction(fn, mask), cls, fn


def poison_unknown(inc: IncompleteSetFunction) -> IncompleteSetFunction:
    """Replace every unmasked value with NaN; bounds must not notice."""
    values = inc.fn.values.copy()
    for s in inc.ground.subsets():
        if s not in inc.mask:
            values[s] = np.nan
    return IncompleteSetFunction(SetFunction(inc.ground, values), inc.mask)


def xos_projection(
    inc: IncompleteSetFunction, subset: int, sense: str, max_iters: int = 500
) -> float:
    """Exact inf/sup of extension values at ``subset`` over all fractionally
    subadditive completions, by LP row generation (test-only reference).

    The extension set is the polytope {g >= 0 : g(T) <= cover cost for every
    fractional cover of every T, g = f on the mask}; violated cover
    constraints are generated with the package's own cover LP.
    """
    import scipy.optimize as sopt

    from subfn.lp import CoverInstance, min_fractional_cover

    n = inc.n
    size = 1 << n
    known = set(inc.known_ids())
    var_ids = [t for t in range(size) if t not in known]
    vid = {t: i for i, t in enumerate(var_ids)}
    c = np.zeros(len(var_ids))
    c[vid[subset]] = 1.0 if sense == "min" else -1.0
    cap = sum(inc.fn[1 << i] for i in range(n))
    rows, rhs = [], []
    for _ in range(max_iters):
        res = sopt.linprog(
            c,
            A_ub=np.array(rows) if rows else None,
            b_ub=np.array(rhs) if rhs else None,
            bounds=[(0.0, cap)] * len(var_ids),
            method="highs",
        )
        assert res.success
        g = np.array([
            inc.fn[t] if t in known else res.x[vid[t]] for t in range(size)
        ])
        violated = False
        for t in range(1, size):
            cands = [(u, float(g[u])) for u in range(1, size) if u != t and u & t]
            sol = min_fractional_cover(CoverInstance(t, cands))
            if sol.objective < g[t] - 1e-9:
                row = np.zeros(len(var_ids))
                bound = 0.0
                if t in known:
                    bound -= inc.fn[t]
                else:
                    row[vid[t]] += 1.0
                for idx, alpha in sol.weights:
                    u = cands[idx][0]
                    if u in known:
                        bound += alpha * inc.fn[u]
                    else:
                        row[vid[u]] -= alpha
                rows.append(row)
                rhs.append(bound)
                violated = True
                break
        if not violated:
            return float(g[subset])
    raise RuntimeError("row generation did not converge")


def is_supermodular(fn: SetFunction, tol: float = 1e-9) -> bool:
    v = fn.values
    n = fn.n
    for s in range(1 << n):
        for i in range(n):
            if s >> i & 1:
                continue
            for j in range(i + 1, n):
                if s >> j & 1:
                    continue
                lhs = v[s | 1 << i] + v[s | 1 << j]
                rhs = v[s | 1 << i | 1 << j] + v[s]
                if lhs > rhs + tol:
                    return False
    return True


def is_submodular(fn: SetFunction, tol: float = 1e-9) -> bool:
    return is_supermodular(SetFunction(fn.ground, -fn.values), tol)
