import math

import numpy as np
import pytest

from helpers import class_instance, masked_instance
from subfn.core import (
    GroundSet,
    IncompleteSetFunction,
    KnownMask,
    SetFunction,
    affine_transform,
    minimal_information,
    popcount,
)
from subfn.divergence import (
    audit_divergence_supermodularity,
    divergence,
    divergence_matrix,
    norm_values,
)
from subfn.errors import TooLarge


def test_full_mask_divergence_is_zero():
    fn, cls = class_instance("SAM", 4, 2)
    inc = IncompleteSetFunction(fn, KnownMask(fn.ground, frozenset(range(16))))
    assert divergence(inc, cls).value == 0.0


def test_worked_example_value():
    values = np.zeros(8)
    values[1] = values[2] = values[4] = 1.0
    values[7] = 2.0
    for s in (3, 5, 6):
        values[s] = 1.5
    inc = IncompleteSetFunction(
        SetFunction.of(3, values), minimal_information(GroundSet(3))
    )
    report = divergence(inc, "S", "l1")
    assert report.value == pytest.approx(3.0)
    assert report.per_set_gap[3] == pytest.approx(1.0)
    assert report.per_set_gap[7] == 0.0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_flat_instance_separates_classes(n):
    values = np.ones(1 << n)
    values[0] = 0.0
    inc = IncompleteSetFunction(
        SetFunction.of(n, values), minimal_information(GroundSet(n))
    )
    assert divergence(inc, "SAM").value == 0.0
    assert divergence(inc, "S").value >= 2 ** n - n - 2


def test_norm_variants_consistent():
    gaps = np.array([[1.0], [2.0], [0.0], [2.0]])
    assert norm_values(gaps, "l1")[0] == pytest.approx(5.0)
    assert norm_values(gaps, "l2")[0] == pytest.approx(3.0)
    assert norm_values(gaps, "linf")[0] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        norm_values(gaps, "l3")


def test_divergence_matrix_matches_scalar_path():
    inc, cls, fn = masked_instance("SAM", 4, 7)
    single = divergence(inc, cls, "l2").value
    batch = divergence_matrix(4, inc.known_ids(), fn.values[:, None], cls, "l2")
    assert batch.shape == (1,)
    assert batch[0] == pytest.approx(single, abs=1e-12)


@pytest.mark.parametrize("tag", ["S", "SAM", "SS", "CA"])
def test_gap_properties_quick(tag):
    # monotone under mask growth, subadditive over disjoint reveals,
    # positively homogeneous under rescaling (module-level sanity; the
    # acceptance suite runs the full-size version)
    rng = np.random.default_rng(101)
    for seed in range(20):
        fn, cls = class_instance(tag, 4, seed)
        ground = fn.ground
        base = minimal_information(ground)
        unknown = [s for s in ground.subsets() if s not in base]
        picks = [s for s in unknown if rng.random() < 0.5]
        half = picks[: len(picks) // 2]
        rest = picks[len(picks) // 2:]

        def dv(extra):
            mask = KnownMask(ground, frozenset(extra))
            return divergence(IncompleteSetFunction(fn, mask), cls).value

        assert dv(half) >= dv(picks) - 1e-9
        assert dv(half) + dv(rest) >= dv(picks) - 1e-9
        alpha = 0.25 + 2.5 * rng.random()
        beta = rng.normal(size=4) if tag == "S" else np.zeros(4)
        scaled = affine_transform(fn, alpha, beta)
        lhs = divergence(
            IncompleteSetFunction(scaled, KnownMask(ground, frozenset(half))), cls
        ).value
        assert lhs == pytest.approx(alpha * dv(half), rel=1e-9, abs=1e-12)


def test_exhaustive_audit_empty_for_subadditive_n3():
    fn, _ = class_instance("S", 3, 5)
    assert audit_divergence_supermodularity(fn, "S") == []


def test_exhaustive_audit_empty_for_symmetric_n4():
    fn, _ = class_instance("SS", 4, 5)
    assert audit_divergence_supermodularity(fn, "SS") == []


def test_exhaustive_audit_size_guard():
    fn, _ = class_instance("S", 5, 1)
    with pytest.raises(TooLarge):
        audit_divergence_supermodularity(fn, "S")


def test_targeted_audit_reports_pairwise_synergy_violation():
    values = np.array(
        [-math.comb(popcount(s), 2) for s in range(64)], dtype=float
    )
    fn = SetFunction.of(6, values)
    violations = audit_divergence_supermodularity(
        fn, "S", mode="targeted", players=(0, 1, 2, 3)
    )
    assert len(violations) == 1
    v = violations[0]
    assert v.revealed == ((1 << 1) | (1 << 2),)
    assert v.first == 0b0011 and v.second == 0b1100
    assert v.deficit > 0.5


def test_targeted_audit_clean_case():
    values = np.array([popcount(s) for s in range(64)], dtype=float)
    violations = audit_divergence_supermodularity(
        SetFunction.of(6, values), "S", mode="targeted", players=(0, 1, 2, 3)
    )
    assert violations == []


def test_targeted_audit_validates_players():
    fn, _ = class_instance("S", 6, 0)
    with pytest.raises(ValueError):
        audit_divergence_supermodularity(fn, "S", mode="targeted", players=(0, 1, 2))
    with pytest.raises(ValueError):
        audit_divergence_supermodularity(fn, "S", mode="targeted", players=(0, 1, 1, 2))


def test_pairwise_synergy_too_small_to_violate_at_n4():
    # the same construction that breaks supermodularity at n=6 is clean at n=4
    values = np.array(
        [-math.comb(popcount(s), 2) for s in range(16)], dtype=float
    )
    assert audit_divergence_supermodularity(SetFunction.of(4, values), "S") == []
