import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqcanary.baselines import ks_test, mann_whitney
from seqcanary.bounds import EpsilonSpec, Method
from seqcanary.empirical import ArmSample
from seqcanary.simulation import (
    ScenarioResult,
    StudyConfig,
    distance_paths,
    draw_pair,
    run_study,
    stopping_times,
)
from seqcanary.testing import Hypothesis, TestConfig, TestState, Verdict, update
from seqcanary.twosample import difference_norms

HOWARD = EpsilonSpec(Method.HOWARD, 0.05)


@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=40))
def test_distance_paths_match_direct(pairs):
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    d_plus, d_minus = distance_paths(x, y)
    for t in range(len(x)):
        ref = difference_norms(ArmSample(x[: t + 1]), ArmSample(y[: t + 1]))
        assert (d_plus[t], d_minus[t]) == pytest.approx(ref)


def generic_stops(x, y, alpha):
    """Reference stopping times from the general-purpose routines."""
    state = TestState(TestConfig(Hypothesis.EQUAL, alpha=alpha, tau=1e-9))
    seq = ks = mw = None
    for t in range(len(x)):
        a, b = ArmSample(x[: t + 1]), ArmSample(y[: t + 1])
        if seq is None:
            update(state, a, b)
            if state.decision is Verdict.REJECT_NULL:
                seq = t + 1
        if ks is None and ks_test(a, b).p_value < alpha:
            ks = t + 1
        if mw is None and mann_whitney(a, b).p_value < alpha:
            mw = t + 1
    return {"ks": ks, "mw": mw, "sequential": seq}


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.floats(1.0, 3.0))
def test_fast_stopping_times_match_generic_engine(seed, scale):
    rng = np.random.default_rng(seed)
    x = rng.gamma(10, 0.1, 250)
    y = rng.gamma(10, 0.1 * scale, 250)
    assert stopping_times(x, y, 0.05, HOWARD) == generic_stops(x, y, 0.05)


def test_draw_pair_reproducible_and_parameterised_by_rate():
    cfg = StudyConfig(cap=20000)
    x1, y1 = draw_pair(cfg, 11.0, 1, 3)
    x2, y2 = draw_pair(cfg, 11.0, 1, 3)
    np.testing.assert_array_equal(x1, x2)
    np.testing.assert_array_equal(y1, y2)
    # Gamma(shape 10, rate r) has mean 10 / r
    assert x1.mean() == pytest.approx(1.0, rel=0.02)
    assert y1.mean() == pytest.approx(10 / 11, rel=0.02)
    assert not np.array_equal(draw_pair(cfg, 11.0, 0, 3)[0], x1)


def test_scenario_result_summaries():
    r = ScenarioResult("null", 10.0, {"ks": [5, None, 7], "mw": [None, None, None], "sequential": [1, 2, 3]})
    assert r.runs == 3 and r.rejections("ks") == 2
    assert r.median_stop("ks") == 7 and math.isinf(r.median_stop("mw"))
    assert r.median_stop("sequential") == 2


def test_small_study_shape():
    res = run_study(StudyConfig(runs=4, cap=400, seed=1))
    assert set(res) == {"null", "alt"}
    assert all(r.runs == 4 for r in res.values())
    assert res["alt"].rate_b == 11.0 and res["null"].rate_b == 10.0
