import subprocess
import sys

import numpy as np
import pytest

from helpers import is_submodular, is_supermodular
from subfn.core import SetFunction, check_class
from subfn.distributions import (
    DistributionSpec,
    pointmass,
    rng_for,
    sample,
    sample_matrix,
)


@pytest.mark.parametrize("kind", ["convex", "xos6", "coverage", "kbudget"])
def test_same_spec_same_index_bit_identical(kind):
    spec = DistributionSpec(kind, 5, seed=99)
    a = sample(spec, 3).values
    b = sample(spec, 3).values
    assert np.array_equal(a, b)
    c = sample(DistributionSpec(kind, 5, seed=99), 3).values
    assert np.array_equal(a, c)


def test_cross_process_determinism():
    spec = DistributionSpec("coverage", 5, seed=1234)
    local = sample(spec, 7).values
    script = (
        "from subfn.distributions import DistributionSpec, sample;"
        "v = sample(DistributionSpec('coverage', 5, seed=1234), 7).values;"
        "print(','.join(repr(float(x)) for x in v))"
    )
    out = subprocess.run(
        [sys.executable, "-c", script], capture_output=True, text=True, check=True
    )
    remote = np.array([float(x) for x in out.stdout.strip().split(",")])
    assert np.array_equal(local, remote)


def test_distinct_indices_distinct_streams():
    spec = DistributionSpec("xos6", 5, seed=5)
    a = sample(spec, 0).values
    b = sample(spec, 1).values
    assert not np.array_equal(a, b)


def test_plan_and_sample_streams_disjoint():
    a = rng_for(7, 0, purpose=0).random(8)
    b = rng_for(7, 0, purpose=1).random(8)
    assert not np.array_equal(a, b)


def test_kbudget_values():
    spec = DistributionSpec("kbudget", 5, seed=21)
    index = next(i for i in range(100) if sample(spec, i).values[-1] == 3.0)
    fn = sample(spec, index)
    assert fn[0b00011] == 2.0
    assert fn[0b11111] == 3.0
    assert fn[0b00111] == 3.0
    assert check_class(fn, "SS")


def test_coverage_union_semantics():
    from subfn.distributions import _sample_coverage

    class FixedRng:
        def __init__(self, member):
            self._member = np.asarray(member)

        def random(self, shape):
            assert shape == self._member.shape
            return np.where(self._member, 0.0, 1.0)

    # X1 = {0,1}, X2 = {1,2}, X3 = {3} over a 6-element universe
    member = np.zeros((3, 6), dtype=bool)
    member[0, [0, 1]] = True
    member[1, [1, 2]] = True
    member[2, 3] = True
    values = _sample_coverage(3, FixedRng(member), 6, 0.5)
    assert values[0b011] == 3.0
    assert values[0b111] == 4.0
    assert values[0b101] == 3.0


@pytest.mark.parametrize("seed", range(30))
def test_convex_samples_are_negated_supermodular(seed):
    fn = sample(DistributionSpec("convex", 4, seed=seed), 0)
    assert fn[0] == 0.0
    assert fn.values.min() == pytest.approx(-1.0)
    assert fn.values.max() <= 0.0
    for i in range(4):
        assert fn[1 << i] == 0.0
    assert is_supermodular(SetFunction(fn.ground, -fn.values))
    assert is_submodular(fn)
    assert check_class(fn, "S")


def test_convex_typically_not_monotone():
    hits = sum(
        not check_class(sample(DistributionSpec("convex", 4, seed=s), 0), "SAM")
        for s in range(20)
    )
    assert hits == 20


@pytest.mark.parametrize("seed", range(10))
def test_sample_class_membership(seed):
    assert check_class(sample(DistributionSpec("xos6", 4, seed=seed), 0), "XOS")
    cov = sample(DistributionSpec("coverage", 4, seed=seed), 0)
    assert check_class(cov, "SAM")
    assert is_submodular(cov)
    assert check_class(sample(DistributionSpec("kbudget", 4, seed=seed), 0), "SS")


def test_xos_membership_at_n6_spot_check():
    assert check_class(sample(DistributionSpec("xos6", 6, seed=17), 0), "XOS")


def test_pointmass_returns_carried_function():
    fn = sample(DistributionSpec("coverage", 3, seed=8), 0)
    spec = pointmass(fn)
    for index in (0, 5, 99):
        assert np.array_equal(sample(spec, index).values, fn.values)


def test_normalize_flag_rescales_or_passes_through():
    spec = DistributionSpec("coverage", 4, seed=3, normalize=True)
    fn = sample(spec, 0)
    for i in range(4):
        assert fn[1 << i] == pytest.approx(0.0, abs=1e-12)
    assert abs(fn[15]) == pytest.approx(1.0)
    # additive sample: the rescaling is degenerate, so it passes through
    kspec = DistributionSpec("kbudget", 4, seed=0, normalize=True)
    index = next(i for i in range(50) if sample(
        DistributionSpec("kbudget", 4, seed=0), i).values[-1] == 4.0)
    raw = sample(DistributionSpec("kbudget", 4, seed=0), index)
    cooked = sample(kspec, index)
    assert np.array_equal(raw.values, cooked.values)


def test_convex_normalization_is_identity():
    raw = sample(DistributionSpec("convex", 5, seed=6), 2)
    cooked = sample(DistributionSpec("convex", 5, seed=6, normalize=True), 2)
    assert np.array_equal(raw.values, cooked.values)


def test_sample_matrix_matches_individual_samples():
    spec = DistributionSpec("xos6", 4, seed=12)
    mat = sample_matrix(spec, 2, 3)
    assert mat.shape == (16, 3)
    for j in range(3):
        assert np.array_equal(mat[:, j], sample(spec, 2 + j).values)


def test_spec_json_roundtrip():
    spec = DistributionSpec("coverage", 5, seed=4, params={"universe": 12})
    again = DistributionSpec.from_json_dict(spec.to_json_dict())
    assert again == spec
    pm = pointmass(sample(spec, 0))
    again = DistributionSpec.from_json_dict(pm.to_json_dict())
    assert np.array_equal(again.point.values, pm.point.values)


def test_invalid_kind_rejected():
    with pytest.raises(ValueError):
        DistributionSpec("uniform", 4)
