"""Fixed-n two-sample baselines: Kolmogorov-Smirnov and Mann-Whitney U.

These are only valid for a single look; the simulation study uses them to
show what continuous monitoring does to their error rate.
"""
from __future__ import annotations

import bisect
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import rankdata

from .empirical import ArmSample
from .errors import EmptySample
from .twosample import supnorm_distance


class Baseline(str, Enum):
    KS = "ks"
    MANN_WHITNEY = "mw"


@dataclass(frozen=True)
class FixedTestResult:
    statistic: float
    p_value: float
    method: Baseline


def kolmogorov_sf(lam: float, tol: float = 1e-12) -> float:
    """P(K > lam) for the Kolmogorov distribution.

    Uses 2 sum (-1)^(k-1) exp(-2 k^2 lam^2) for lam >= 1; below that the
    alternating series converges slowly, so the theta-function form of the
    CDF is summed instead. Both stop once a term drops under ``tol``.
    """
    if lam <= 0:
        return 1.0
    if lam >= 1.0:
        total, k = 0.0, 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            total += term if k % 2 else -term
            if term < tol:
                break
            k += 1
        return min(1.0, max(0.0, 2.0 * total))
    c = -(math.pi**2) / (8.0 * lam * lam)
    total, k = 0.0, 1
    while True:
        term = math.exp(c * (2 * k - 1) ** 2)
        total += term
        if term < tol:
            break
        k += 1
    cdf = math.sqrt(2.0 * math.pi) / lam * total
    return min(1.0, max(0.0, 1.0 - cdf))


def ks_pvalue(d: float, n_a: int, n_b: int) -> float:
    return kolmogorov_sf(math.sqrt(n_a * n_b / (n_a + n_b)) * d)


def ks_test(a: ArmSample, b: ArmSample) -> FixedTestResult:
    if a.n == 0 or b.n == 0:
        raise EmptySample("KS test needs both arms non-empty")
    d = supnorm_distance(a, b)
    return FixedTestResult(d, ks_pvalue(d, a.n, b.n), Baseline.KS)


EXACT_LIMIT = 12


def _normal_two_sided(u: float, n_a: int, n_b: int, tie_sum: float) -> float:
    """Normal approximation with tie-corrected variance and continuity correction.

    ``tie_sum`` is sum(t^3 - t) over tie groups of the pooled sample.
    """
    big_n = n_a + n_b
    mean = n_a * n_b / 2.0
    var = n_a * n_b / 12.0 * ((big_n + 1) - tie_sum / (big_n * (big_n - 1)))
    if var <= 0:
        return 1.0
    z = (abs(u - mean) - 0.5) / math.sqrt(var)
    if z <= 0:
        return 1.0
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def _exact_two_sided(pooled: np.ndarray, n_a: int, u_obs: float) -> float:
    """Permutation distribution of U over all assignments of pooled midranks to arm A."""
    ranks = rankdata(pooled)
    big_n = len(pooled)
    n_b = big_n - n_a
    mean = n_a * n_b / 2.0
    offset = n_a * (n_a + 1) / 2.0
    dev_obs = abs(u_obs - mean)
    hits = total = 0
    for idx in itertools.combinations(range(big_n), n_a):
        u = sum(ranks[i] for i in idx) - offset
        total += 1
        if abs(u - mean) >= dev_obs - 1e-9:
            hits += 1
    return hits / total


def _tie_sum(pooled: np.ndarray) -> float:
    _, counts = np.unique(pooled, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def mann_whitney(a: ArmSample, b: ArmSample) -> FixedTestResult:
    """U = #{(i, j): a_i > b_j} + ties / 2, two-sided p-value.

    Exact enumeration when n_a + n_b <= 12, normal approximation otherwise.
    """
    if a.n == 0 or b.n == 0:
        raise EmptySample("Mann-Whitney test needs both arms non-empty")
    pooled = np.concatenate((a.values, b.values))
    ranks = rankdata(pooled)
    u = float(ranks[: a.n].sum() - a.n * (a.n + 1) / 2.0)
    if a.n + b.n <= EXACT_LIMIT:
        p = _exact_two_sided(pooled, a.n, u)
    else:
        p = _normal_two_sided(u, a.n, b.n, _tie_sum(pooled))
    return FixedTestResult(u, p, Baseline.MANN_WHITNEY)


class IncrementalMannWhitney:
    """Mann-Whitney U maintained under one-at-a-time insertions.

    Each insertion costs two binary searches plus a list insert, so a
    p-value after every new observation stays cheap over long streams.
    """

    def __init__(self):
        self.a: list[float] = []
        self.b: list[float] = []
        self.u = 0.0
        self._counts: Counter = Counter()
        self.tie_sum = 0.0

    def _count_tie(self, x: float) -> None:
        c = self._counts[x]
        # (c+1)^3 - (c+1) - (c^3 - c) = 3c^2 + 3c
        self.tie_sum += 3.0 * c * c + 3.0 * c
        self._counts[x] = c + 1

    def add_a(self, x: float) -> None:
        lo = bisect.bisect_left(self.b, x)
        hi = bisect.bisect_right(self.b, x)
        self.u += lo + 0.5 * (hi - lo)
        bisect.insort(self.a, x)
        self._count_tie(x)

    def add_b(self, y: float) -> None:
        lo = bisect.bisect_left(self.a, y)
        hi = bisect.bisect_right(self.a, y)
        self.u += (len(self.a) - hi) + 0.5 * (hi - lo)
        bisect.insort(self.b, y)
        self._count_tie(y)

    def p_value(self) -> float:
        n_a, n_b = len(self.a), len(self.b)
        if n_a == 0 or n_b == 0:
            return 1.0
        if n_a + n_b <= EXACT_LIMIT:
            return _exact_two_sided(np.array(self.a + self.b), n_a, self.u)
        return _normal_two_sided(self.u, n_a, n_b, self.tie_sum)
