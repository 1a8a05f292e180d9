"""Continuous-monitoring study: fixed-n KS and Mann-Whitney versus the sequential test.

Each replication draws two i.i.d. Gamma streams, reveals them one pair at a
time, and runs every test after each new pair. A test stops the first time
its p-value drops below alpha; runs that never stop by the cap are censored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import IncrementalMannWhitney, ks_pvalue
from .bounds import EpsilonSpec, Method
from .testing import pvalue_equal_n

RNG_NAME = "numpy.random.Generator(PCG64)"
TESTS = ("ks", "mw", "sequential")


@dataclass(frozen=True)
class StudyConfig:
    runs: int = 100
    cap: int = 5000
    alpha: float = 0.05
    shape: float = 10.0
    rate_a: float = 10.0
    rate_b_alt: float = 11.0
    seed: int = 2023
    method: Method = Method.HOWARD


@dataclass
class ScenarioResult:
    scenario: str
    rate_b: float
    stops: dict = field(default_factory=lambda: {name: [] for name in TESTS})

    @property
    def runs(self) -> int:
        return len(self.stops["ks"])

    def rejections(self, test: str) -> int:
        return sum(s is not None for s in self.stops[test])

    def median_stop(self, test: str) -> float:
        """Median stopping time with censored runs counted as +inf."""
        vals = sorted(math.inf if s is None else s for s in self.stops[test])
        if not vals:
            return math.nan
        return float(np.median(vals))


def distance_paths(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sup d_t^+ and sup d_t^- for t = 1..T where the arms hold x[:t] and y[:t].

    Keeps c[k] = n_b(<= v_k) - n_a(<= v_k) over the sorted pooled values of the
    whole run; observations not yet revealed contribute zero, so each new
    pair is two suffix updates. Tied pooled values are only read at the end
    of their tie group.
    """
    T = len(x)
    pooled = np.concatenate((x, y))
    order = np.argsort(pooled, kind="stable")
    sv = pooled[order]
    rank = np.empty(2 * T, dtype=np.int64)
    rank[order] = np.arange(2 * T)
    keep = np.append(sv[1:] != sv[:-1], True)
    all_kept = bool(keep.all())
    c = np.zeros(2 * T, dtype=np.int64)
    d_plus = np.empty(T)
    d_minus = np.empty(T)
    for t in range(T):
        c[rank[t]:] -= 1
        c[rank[T + t]:] += 1
        view = c if all_kept else c[keep]
        d_plus[t] = max(0, view.max()) / (t + 1)
        d_minus[t] = max(0, -view.min()) / (t + 1)
    return d_plus, d_minus


def stopping_times(x: np.ndarray, y: np.ndarray, alpha: float,
                   spec: EpsilonSpec) -> dict[str, Optional[int]]:
    """Number of pairs at which each test first rejects F_a = F_b, or None."""
    d_plus, d_minus = distance_paths(x, y)
    norm = np.maximum(d_plus, d_minus)
    stops: dict[str, Optional[int]] = {name: None for name in TESTS}

    for t in range(len(x)):
        n = t + 1
        if stops["ks"] is None and ks_pvalue(norm[t], n, n) < alpha:
            stops["ks"] = n
        if stops["sequential"] is None and pvalue_equal_n(norm[t], n, spec) < alpha:
            stops["sequential"] = n
        if stops["ks"] is not None and stops["sequential"] is not None:
            break

    mw = IncrementalMannWhitney()
    for t in range(len(x)):
        mw.add_a(float(x[t]))
        mw.add_b(float(y[t]))
        if mw.p_value() < alpha:
            stops["mw"] = t + 1
            break
    return stops


def draw_pair(cfg: StudyConfig, rate_b: float, scenario_id: int, run: int):
    rng = np.random.default_rng([cfg.seed, scenario_id, run])
    x = rng.gamma(cfg.shape, 1.0 / cfg.rate_a, size=cfg.cap)
    y = rng.gamma(cfg.shape, 1.0 / rate_b, size=cfg.cap)
    return x, y


SCENARIOS = {"null": 0, "alt": 1}


def run_scenario(cfg: StudyConfig, scenario: str) -> ScenarioResult:
    if not 0 < cfg.alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    rate_b = cfg.rate_a if scenario == "null" else cfg.rate_b_alt
    spec = EpsilonSpec(cfg.method, cfg.alpha)
    result = ScenarioResult(scenario, rate_b)
    for run in range(cfg.runs):
        x, y = draw_pair(cfg, rate_b, SCENARIOS[scenario], run)
        for name, stop in stopping_times(x, y, cfg.alpha, spec).items():
            result.stops[name].append(stop)
    return result


def run_study(cfg: StudyConfig, scenarios=("null", "alt")) -> dict[str, ScenarioResult]:
    return {s: run_scenario(cfg, s) for s in scenarios}
