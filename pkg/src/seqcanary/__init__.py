"""Anytime-valid sequential tests of stochastic order and equality in distribution
for two-armed metric streams."""

__version__ = "0.1.0"

from .bounds import BandCurve, BandKind, EpsilonSpec, Method, cdf_band, epsilon, quantile_band
from .empirical import NEG_INF, POS_INF, ArmSample, ecdf_at, lower_quantile, merged_grid, upper_quantile
from .testing import (
    Hypothesis,
    TestConfig,
    TestState,
    Verdict,
    fixed_pvalue_precedes,
    fixed_sample_size,
    seq_pvalue,
    sequential_max_n,
    update,
)
from .twosample import (
    DiffBand,
    RunningIntersection,
    ScalarInterval,
    abs_diff_band,
    diff_band,
    sup_inf_intervals,
    supnorm_interval,
    update_running,
)

__all__ = [
    "ArmSample", "BandCurve", "BandKind", "DiffBand", "EpsilonSpec", "Hypothesis", "Method",
    "NEG_INF", "POS_INF", "RunningIntersection", "ScalarInterval", "TestConfig", "TestState",
    "Verdict", "abs_diff_band", "cdf_band", "diff_band", "ecdf_at", "epsilon",
    "fixed_pvalue_precedes", "fixed_sample_size", "lower_quantile", "merged_grid",
    "quantile_band", "seq_pvalue", "sequential_max_n", "sup_inf_intervals",
    "supnorm_interval", "update", "update_running", "upper_quantile",
]
