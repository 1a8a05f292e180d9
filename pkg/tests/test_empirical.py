import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gammainc

from seqcanary.bounds import EpsilonSpec, Method, epsilon
from seqcanary.empirical import (
    NEG_INF,
    POS_INF,
    ArmSample,
    ecdf_at,
    lower_quantile,
    merged_grid,
    upper_quantile,
)
from seqcanary.errors import EmptySample, InvalidProbability

samples = st.lists(st.integers(-20, 20).map(float), min_size=1, max_size=50)


def brute_upper_quantile(values, p, grid):
    n = len(values)
    ok = [x for x in grid if sum(v <= x for v in values) / n <= p]
    return max(ok)


def brute_lower_quantile(values, p, grid):
    n = len(values)
    ok = [x for x in grid if sum(v <= x for v in values) / n < p]
    return max(ok)


def test_ecdf_counts():
    s = ArmSample([1, 2, 3])
    assert ecdf_at(s, 2) == pytest.approx(2 / 3)
    single = ArmSample([5])
    assert ecdf_at(single, 4.999) == 0
    assert ecdf_at(single, 5) == 1


def test_ecdf_empty_sample():
    with pytest.raises(EmptySample):
        ecdf_at(ArmSample(), 0.0)


def test_ecdf_gamma_within_dkwm_radius():
    rng = np.random.default_rng(8)
    s = ArmSample(rng.gamma(10, 1 / 10, size=500))
    truth = gammainc(10, 10 * 1.0)  # regularized lower incomplete gamma = Gamma(10, rate 10) CDF
    assert truth == pytest.approx(0.5421, abs=1e-4)
    eps = epsilon(EpsilonSpec(Method.FIXED_DKWM, 0.01), 500)
    assert abs(ecdf_at(s, 1.0) - truth) <= eps


def test_upper_quantile_examples():
    s = ArmSample([1, 2, 3])
    assert upper_quantile(s, 0.5) == 2
    assert upper_quantile(s, 1.0) == POS_INF
    assert upper_quantile(s, -0.1) == NEG_INF
    s4 = ArmSample([10, 20, 30, 40])
    grid = np.arange(0, 100, 0.5)
    # brute-force sup{x : F_n(x) <= p} on a fine grid lands just below the next order statistic
    assert brute_upper_quantile([10, 20, 30, 40], 0.74, grid) == 29.5
    assert upper_quantile(s4, 0.74) == 30
    assert brute_upper_quantile([10, 20, 30, 40], 0.75, grid) == 39.5
    assert upper_quantile(s4, 0.75) == 40


def test_lower_quantile_examples():
    s = ArmSample([1, 2, 3])
    assert lower_quantile(s, 2 / 3) == 2
    assert lower_quantile(s, 0) == NEG_INF
    s4 = ArmSample([10, 20, 30, 40])
    grid = np.arange(0, 100, 0.5)
    # sup{x : F_n(x) < p} on the grid sits just below the ceil(np)-th order statistic
    assert brute_lower_quantile([10, 20, 30, 40], 0.5, grid) == 19.5
    assert lower_quantile(s4, 0.5) == 20
    with pytest.raises(InvalidProbability):
        lower_quantile(s4, 1.01)


def test_merged_grid_examples():
    assert merged_grid(ArmSample([1, 2]), ArmSample([2, 3])).tolist() == [1, 2, 3]
    assert merged_grid(ArmSample([1]), ArmSample([1])).tolist() == [1]
    assert merged_grid(ArmSample([0.5, 1.5]), ArmSample([1.0])).tolist() == [0.5, 1.0, 1.5]


@given(samples, st.floats(0, 1, exclude_max=True))
def test_upper_quantile_matches_integer_grid_scan(values, p):
    s = ArmSample(values)
    # on integer data the right-continuous inverse is the first grid point where F_n exceeds p
    grid = np.arange(-21, 22)
    f = np.array([sum(v <= x for v in values) / len(values) for x in grid])
    first_above = grid[np.argmax(f > p)]
    assert upper_quantile(s, p) == first_above


@given(samples, st.floats(0, 1, exclude_min=True))
def test_lower_quantile_matches_integer_grid_scan(values, p):
    s = ArmSample(values)
    grid = np.arange(-21, 22)
    f = np.array([sum(v <= x for v in values) / len(values) for x in grid])
    first_reach = grid[np.argmax(f >= p)]
    assert lower_quantile(s, p) == first_reach


@given(samples)
def test_ecdf_monotone_and_limits(values):
    s = ArmSample(values)
    xs = np.linspace(min(values) - 1, max(values) + 1, 101)
    f = ecdf_at(s, xs)
    assert np.all(np.diff(f) >= 0)
    assert ecdf_at(s, min(values) - 1e-9) == 0
    assert ecdf_at(s, max(values)) == 1


@given(samples, st.floats(0.001, 0.999))
def test_lower_below_upper(values, p):
    s = ArmSample(values)
    assert lower_quantile(s, p) <= upper_quantile(s, p)


@given(samples)
def test_galois_rank_consistency(values):
    s = ArmSample(values)
    n = s.n
    for v in values:
        rank = ecdf_at(s, v)
        back = upper_quantile(s, rank - 1 / (2 * n))
        assert ecdf_at(s, back) == pytest.approx(rank)


@given(samples, st.lists(st.integers(-20, 20).map(float), min_size=1, max_size=20))
def test_insert_agrees_with_recount(values, extra):
    s = ArmSample(values)
    for x in extra:
        before = s.n
        s.add(x)
        assert s.n == before + 1
    assert np.all(np.diff(s.values) >= 0)
    allv = values + extra
    grid = merged_grid(s, ArmSample(extra))
    for x in grid:
        assert ecdf_at(s, x) == pytest.approx(sum(v <= x for v in allv) / len(allv))


def test_extend_and_remove():
    s = ArmSample([3, 1])
    s.extend([2, 2])
    assert s.values.tolist() == [1, 2, 2, 3]
    s.remove(2)
    assert s.values.tolist() == [1, 2, 3]
    with pytest.raises(KeyError):
        s.remove(7)
    assert s.copy() == s and s.copy() is not s


def test_nan_rejected():
    with pytest.raises(ValueError):
        ArmSample([math.nan])
    with pytest.raises(ValueError):
        ArmSample([1.0]).add(math.nan)
