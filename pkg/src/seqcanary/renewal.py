"""Count metrics as renewal processes: test the inter-arrival distributions."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .empirical import ArmSample
from .errors import STARVED_ARM, InsufficientEvents, NonincreasingTimestamps
from .twosample import PooledSample
from .testing import TestConfig, TestState, update


@dataclass
class EpochStream:
    arm: str
    timestamps: list = field(default_factory=list)

    def __post_init__(self):
        self.timestamps = [float(t) for t in self.timestamps]
        _validate(self.timestamps)

    def append(self, ts: float) -> None:
        ts = float(ts)
        if ts < 0:
            raise NonincreasingTimestamps(f"negative timestamp {ts}")
        if self.timestamps and ts <= self.timestamps[-1]:
            raise NonincreasingTimestamps(f"{ts} <= {self.timestamps[-1]}")
        self.timestamps.append(ts)

    def __len__(self) -> int:
        return len(self.timestamps)


def _validate(ts) -> None:
    arr = np.asarray(ts, dtype=float)
    if arr.size and arr[0] < 0:
        raise NonincreasingTimestamps("timestamps must be non-negative")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise NonincreasingTimestamps("timestamps must be strictly increasing")


@dataclass
class InterArrivalSample:
    gaps: np.ndarray

    def __len__(self) -> int:
        return int(self.gaps.size)

    def as_arm_sample(self) -> ArmSample:
        return ArmSample(self.gaps)


def to_gaps(s: EpochStream) -> InterArrivalSample:
    if len(s.timestamps) < 2:
        raise InsufficientEvents(f"arm {s.arm!r} has {len(s.timestamps)} event(s), need 2")
    ts = np.asarray(s.timestamps, dtype=float)
    gaps = np.diff(ts)
    if np.any(gaps <= 0):
        raise NonincreasingTimestamps("timestamps must be strictly increasing")
    return InterArrivalSample(gaps)


def count_metric_test(a: EpochStream, b: EpochStream, config: TestConfig,
                      cadence: int = 1) -> TestState:
    """Replay both streams in time order, testing gap distributions as events arrive.

    Fewer events per unit time in B shows up as stochastically larger gaps in
    B. Evaluation happens every ``cadence`` events once both arms have a gap;
    the replay stops at the first decision. If either arm never yields a gap
    the state stays CONTINUE and carries a STARVED_ARM diagnostic.
    """
    state = TestState(config)
    gaps = {"a": ArmSample(), "b": ArmSample()}
    pooled = PooledSample()
    last = {"a": None, "b": None}
    merged = heapq.merge(((t, "a") for t in a.timestamps), ((t, "b") for t in b.timestamps))
    since = 0
    for ts, arm in merged:
        if last[arm] is not None:
            gaps[arm].add(ts - last[arm])
            pooled.add(arm, ts - last[arm])
        last[arm] = ts
        since += 1
        if gaps["a"].n == 0 or gaps["b"].n == 0 or since < cadence:
            continue
        since = 0
        update(state, gaps["a"], gaps["b"], t=ts, pooled=pooled)
        if state.frozen:
            return state
    if gaps["a"].n == 0 or gaps["b"].n == 0:
        state.n_a, state.n_b = gaps["a"].n, gaps["b"].n
        state.diagnostics.append(STARVED_ARM)
    elif since:
        update(state, gaps["a"], gaps["b"], t=ts, pooled=pooled)
    return state


def poisson_stream(arm: str, rate: float, horizon: float, rng: np.random.Generator) -> EpochStream:
    """Homogeneous Poisson arrivals on [0, horizon]."""
    ts, t = [], 0.0
    chunk = max(16, int(rate * horizon * 1.2) + 16)
    while True:
        for g in rng.exponential(1.0 / rate, size=chunk):
            t += g
            if t > horizon:
                return EpochStream(arm, ts)
            ts.append(t)
