"""Sequential hypothesis engine: p-values, running minimum, stopping rules, planning."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .bounds import EpsilonSpec, Method, alpha_for_radius, radius
from .empirical import ArmSample
from .errors import ConfigError, UpdateAfterDecision
from .twosample import (
    BandExtremes,
    PooledSample,
    RunningIntersection,
    band_extremes,
    difference_norms,
    sup_inf_intervals,
    supnorm_interval,
    update_running,
)


class Hypothesis(str, Enum):
    """Null hypotheses, with d = F_b - F_a.

    A_PRECEDES_B: F_a >= F_b everywhere (d <= 0).
    A_SUCCEEDS_B: F_a <= F_b everywhere (d >= 0); "B is no worse than A"
    when larger values are bad.
    EQUAL: F_a = F_b.
    """

    A_PRECEDES_B = "geq"
    A_SUCCEEDS_B = "leq"
    EQUAL = "eq"


class Verdict(str, Enum):
    CONTINUE = "continue"
    REJECT_NULL = "reject"
    ACCEPT_APPROX_NULL = "accept"


def statistic_for(hyp: Hypothesis, d_plus: float, d_minus: float) -> float:
    if hyp is Hypothesis.A_PRECEDES_B:
        return d_plus
    if hyp is Hypothesis.A_SUCCEEDS_B:
        return d_minus
    return max(d_plus, d_minus)


# --- p-values ---------------------------------------------------------------

def _combined_radius(spec: EpsilonSpec, alpha: float, n_a: int, n_b: int) -> float:
    return (radius(spec.method, alpha / 2, n_a, spec.n_star)
            + radius(spec.method, alpha / 2, n_b, spec.n_star))


def pvalue_equal_n(d: float, n: int, spec: EpsilonSpec) -> float:
    """Closed-form root of d = 2 eps_n(alpha/2), clipped to (0, 1].

    Fixed-n: 4 exp(-n d^2 / 2). Howard: 3224 exp(-(n (d/2 / 0.85)^2 - log log(e n)) / 0.8).
    """
    if d <= 0:
        return 1.0
    return min(1.0, 2.0 * alpha_for_radius(spec.method, d / 2, n, spec.n_star))


def pvalue_bracket(d: float, n_a: int, n_b: int, spec: EpsilonSpec) -> tuple[float, float]:
    """Bounds on the root: the equal-n p-value at max(n) and at min(n)."""
    return (pvalue_equal_n(d, max(n_a, n_b), spec),
            pvalue_equal_n(d, min(n_a, n_b), spec))


P_FLOOR = 1e-300


def pvalue_root(d: float, n_a: int, n_b: int, spec: EpsilonSpec, max_iter: int = 200) -> float:
    """Bisection for the alpha solving d = eps_{n_a}(alpha/2) + eps_{n_b}(alpha/2).

    Bisects at the geometric midpoint, since roots can sit hundreds of
    decades below 1, and runs until the bracket stops shrinking in floating
    point. Results are floored at P_FLOOR.
    """
    if d <= 0:
        return 1.0

    def f(alpha: float) -> float:
        return d - _combined_radius(spec, alpha, n_a, n_b)

    # f increases with alpha: larger alpha means narrower bands.
    if f(1.0) <= 0:
        return 1.0
    lo, hi = pvalue_bracket(d, n_a, n_b, spec)
    # both ends can underflow for large n d^2, and rounding can leave the
    # root a hair outside the analytic bracket; widen geometrically
    hi = min(max(hi, P_FLOOR), 1.0)
    while f(hi) < 0:
        hi = min(1.0, hi * 2.0**8)
    lo = min(max(lo, P_FLOOR), hi)
    while f(lo) > 0:
        if lo <= P_FLOOR:
            return P_FLOOR
        lo = max(lo * 2.0**-8, P_FLOOR)
    for _ in range(max_iter):
        mid = math.sqrt(lo) * math.sqrt(hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return max(hi, P_FLOOR)


def pvalue_from_distance(d: float, n_a: int, n_b: int, spec: EpsilonSpec) -> float:
    if d <= 0:
        return 1.0
    if n_a == n_b:
        return max(pvalue_equal_n(d, n_a, spec), P_FLOOR)
    return pvalue_root(d, n_a, n_b, spec)


FIXED = EpsilonSpec(Method.FIXED_DKWM, 0.05)
HOWARD = EpsilonSpec(Method.HOWARD, 0.05)


def fixed_pvalue(a: ArmSample, b: ArmSample, hyp: Hypothesis = Hypothesis.A_PRECEDES_B) -> float:
    d_plus, d_minus = difference_norms(a, b)
    return pvalue_from_distance(statistic_for(hyp, d_plus, d_minus), a.n, b.n, FIXED)


def fixed_pvalue_precedes(a: ArmSample, b: ArmSample) -> float:
    return fixed_pvalue(a, b, Hypothesis.A_PRECEDES_B)


def seq_pvalue(a: ArmSample, b: ArmSample, hyp: Hypothesis, spec: EpsilonSpec = HOWARD) -> float:
    """Anytime-valid p-value; the alpha of ``spec`` is irrelevant here."""
    if not Method(spec.method).sequential:
        raise ConfigError("sequential p-values need a time-uniform epsilon method")
    if min(a.n, b.n) < spec.n_min:
        return 1.0
    d_plus, d_minus = difference_norms(a, b)
    return pvalue_from_distance(statistic_for(hyp, d_plus, d_minus), a.n, b.n, spec)


# --- sequential state -------------------------------------------------------

@dataclass(frozen=True)
class TestConfig:
    hypothesis: Hypothesis = Hypothesis.EQUAL
    alpha: float = 0.05
    tau: float = 0.1
    method: Method = Method.HOWARD
    n_star: int = 2

    __test__ = False  # not a pytest class

    def __post_init__(self):
        object.__setattr__(self, "hypothesis", Hypothesis(self.hypothesis))
        object.__setattr__(self, "method", Method(self.method))
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if not self.method.sequential:
            raise ConfigError("sequential monitoring needs a time-uniform epsilon method")
        if self.method is Method.DARLING_ROBBINS and self.n_star < 2:
            raise ConfigError(f"n_star must be >= 2, got {self.n_star}")

    @property
    def epsilon(self) -> EpsilonSpec:
        return EpsilonSpec(self.method, self.alpha, self.n_star)


@dataclass
class Evaluation:
    """One decision record."""

    t: Optional[float]
    n_a: int
    n_b: int
    p: float
    q: float
    sup_d_l: float
    sup_d_u: float
    inf_d_l: float
    inf_d_u: float
    l: float
    u: float
    decision: Verdict

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out["decision"] = self.decision.value
        return out


@dataclass
class Decision:
    verdict: Verdict
    p_at_decision: float
    n_a: int
    n_b: int
    t: Optional[float]
    bounds_snapshot: dict


def reject_predicate(hyp: Hypothesis, ex: BandExtremes) -> bool:
    if hyp is Hypothesis.A_PRECEDES_B:
        return ex.sup_lower > 0
    if hyp is Hypothesis.A_SUCCEEDS_B:
        return ex.inf_upper < 0
    return supnorm_interval(ex).lo > 0


def accept_predicate(hyp: Hypothesis, ex: BandExtremes, tau: float) -> bool:
    if hyp is Hypothesis.A_PRECEDES_B:
        return ex.sup_upper < tau
    if hyp is Hypothesis.A_SUCCEEDS_B:
        return ex.inf_lower > -tau
    return supnorm_interval(ex).hi < tau


@dataclass
class TestState:
    config: TestConfig
    q: float = 1.0
    n_a: int = 0
    n_b: int = 0
    decision: Verdict = Verdict.CONTINUE
    decided_at: Optional[Decision] = None
    last: Optional[Evaluation] = None
    evaluations: int = 0
    sup_cs: RunningIntersection = field(default_factory=RunningIntersection)
    inf_cs: RunningIntersection = field(default_factory=RunningIntersection)
    norm_cs: RunningIntersection = field(default_factory=RunningIntersection)
    diagnostics: list = field(default_factory=list)

    __test__ = False

    @property
    def frozen(self) -> bool:
        return self.decision is not Verdict.CONTINUE


def update(state: TestState, a: ArmSample, b: ArmSample, t: float | None = None,
           pooled: PooledSample | None = None) -> TestState:
    """Recompute the sequential p-value and apply the stopping rules in place.

    Reject wins if both predicates hold at the same evaluation. ``pooled``
    is an optional merged index of the same data that makes the sup-norm
    pass cheaper for long streams.
    """
    if state.frozen:
        raise UpdateAfterDecision(f"test already decided: {state.decision.value}")
    cfg = state.config
    state.n_a, state.n_b = a.n, b.n
    if min(a.n, b.n) < cfg.epsilon.n_min:
        return state

    ex = band_extremes(a, b, cfg.epsilon, pooled)
    p = pvalue_from_distance(statistic_for(cfg.hypothesis, ex.d_plus, ex.d_minus), a.n, b.n, cfg.epsilon)
    state.q = min(state.q, p)
    sup_iv, inf_iv = sup_inf_intervals(ex)
    norm_iv = supnorm_interval(ex)
    state.sup_cs = update_running(state.sup_cs, sup_iv)
    state.inf_cs = update_running(state.inf_cs, inf_iv)
    state.norm_cs = update_running(state.norm_cs, norm_iv)
    for r in (state.sup_cs, state.inf_cs, state.norm_cs):
        for flag in r.flags:
            if flag not in state.diagnostics:
                state.diagnostics.append(flag)

    if reject_predicate(cfg.hypothesis, ex):
        verdict = Verdict.REJECT_NULL
    elif accept_predicate(cfg.hypothesis, ex, cfg.tau):
        verdict = Verdict.ACCEPT_APPROX_NULL
    else:
        verdict = Verdict.CONTINUE

    state.evaluations += 1
    state.last = Evaluation(t, a.n, b.n, p, state.q, ex.sup_lower, ex.sup_upper,
                            ex.inf_lower, ex.inf_upper, norm_iv.lo, norm_iv.hi, verdict)
    if verdict is not Verdict.CONTINUE:
        state.decision = verdict
        snapshot = {"sup": sup_iv, "inf": inf_iv, "norm": norm_iv}
        state.decided_at = Decision(verdict, p, a.n, b.n, t, snapshot)
    return state


# --- planning ---------------------------------------------------------------

def fixed_sample_size(alpha: float, r: float) -> int:
    """Equal-n sample size per arm for a difference band of radius at most r."""
    if not 0 < alpha < 1 or not r > 0:
        raise ConfigError("need 0 < alpha < 1 and r > 0")
    return max(1, math.ceil(2.0 * math.log(4.0 / alpha) / r**2))


def sequential_max_n(spec: EpsilonSpec, r: float) -> int:
    """Smallest n with 2 eps_n(alpha/2) <= r, by doubling then bisection."""
    if not r > 0:
        raise ConfigError("r must be positive")
    if not Method(spec.method).sequential:
        raise ConfigError("sequential_max_n needs a time-uniform epsilon method")

    def ok(n: int) -> bool:
        return 2.0 * radius(spec.method, spec.alpha / 2, n, spec.n_star) <= r

    lo = spec.n_min
    if ok(lo):
        return lo
    hi = lo * 2
    while not ok(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
