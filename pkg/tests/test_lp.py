import itertools
import math

import numpy as np
import pytest

from subfn.errors import Infeasible, TooLarge, Unbounded
from subfn.lp import CoverInstance, min_fractional_cover
from subfn.oracles import enumerate_cover_optimum


def test_three_pairwise_candidates_give_half_weights():
    instance = CoverInstance(0b111, [(0b011, 1.0), (0b101, 1.0), (0b110, 1.0)])
    sol = min_fractional_cover(instance)
    assert sol.objective == pytest.approx(1.5, abs=1e-9)
    assert sorted(i for i, _ in sol.weights) == [0, 1, 2]
    for _, alpha in sol.weights:
        assert alpha == pytest.approx(0.5, abs=1e-9)


def test_single_element_single_candidate():
    sol = min_fractional_cover(CoverInstance(0b1, [(0b1, 3.25)]))
    assert sol.objective == pytest.approx(3.25)
    assert sol.weights == [(0, pytest.approx(1.0))]


def test_empty_target_costs_nothing():
    sol = min_fractional_cover(CoverInstance(0, [(0b1, 1.0)]))
    assert sol.objective == 0.0
    assert sol.weights == []


def test_infeasible_when_element_uncovered():
    with pytest.raises(Infeasible):
        min_fractional_cover(CoverInstance(0b11, [(0b1, 1.0)]))


def test_negative_cost_candidate_is_unbounded():
    with pytest.raises(Unbounded):
        min_fractional_cover(CoverInstance(0b1, [(0b1, 1.0), (0b11, -0.5)]))


def _random_instance(rng, max_elems=4, max_cands=8):
    k = int(rng.integers(1, max_elems + 1))
    target = (1 << k) - 1
    m = int(rng.integers(1, max_cands + 1))
    candidates = []
    for _ in range(m):
        t = int(rng.integers(1, 1 << k))
        candidates.append((t, float(rng.random() * 3)))
    union = 0
    for t, _ in candidates:
        union |= t
    if union != target:
        candidates.append((target, float(rng.random() * 3 + 1)))
    return CoverInstance(target, candidates)


@pytest.mark.parametrize("seed", range(120))
def test_matches_dual_vertex_enumeration(seed):
    rng = np.random.default_rng((seed, 21))
    instance = _random_instance(rng)
    sol = min_fractional_cover(instance)
    brute = enumerate_cover_optimum(instance)
    assert sol.objective == pytest.approx(brute, abs=1e-6, rel=1e-6)


@pytest.mark.parametrize("seed", range(40))
def test_weights_form_a_cover_and_price_out(seed):
    rng = np.random.default_rng((seed, 22))
    instance = _random_instance(rng)
    sol = min_fractional_cover(instance)
    from subfn.core import elements

    coverage = {j: 0.0 for j in elements(instance.elements)}
    total = 0.0
    for idx, alpha in sol.weights:
        assert alpha >= 0
        t, cost = instance.candidates[idx]
        total += alpha * cost
        for j in coverage:
            if t >> j & 1:
                coverage[j] += alpha
    for j, mass in coverage.items():
        assert mass >= 1 - 1e-9
    assert total == pytest.approx(sol.objective, abs=1e-8)


@pytest.mark.parametrize("seed", range(40))
def test_integral_cover_bounds_fractional_from_above(seed):
    rng = np.random.default_rng((seed, 23))
    instance = _random_instance(rng, max_elems=3, max_cands=6)
    sol = min_fractional_cover(instance)
    best = math.inf
    m = len(instance.candidates)
    for r in range(1, m + 1):
        for combo in itertools.combinations(range(m), r):
            union = 0
            cost = 0.0
            for i in combo:
                union |= instance.candidates[i][0]
                cost += instance.candidates[i][1]
            if union & instance.elements == instance.elements:
                best = min(best, cost)
    assert best >= sol.objective - 1e-9


def test_degenerate_ties_terminate():
    # many identical candidates force degenerate pivots; Bland must not cycle
    cands = [(0b11, 1.0)] * 6 + [(0b01, 0.0), (0b10, 0.0)]
    sol = min_fractional_cover(CoverInstance(0b11, cands))
    assert sol.objective == pytest.approx(0.0, abs=1e-12)


def test_vertex_enumeration_guard():
    with pytest.raises(TooLarge):
        enumerate_cover_optimum(CoverInstance(0b11111, [(0b11111, 1.0)]))
