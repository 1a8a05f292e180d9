"""Event parsing, per-test monitoring state, and snapshot persistence.

Input events are newline-delimited JSON objects::

    {"arm": "a", "value": 120.5, "ts": 3.25}

Count-metric events omit ``value`` (or it is ignored). Snapshots are
newline-delimited JSON too: a header with the configuration and sequential
state, one line per retained observation, and a trailer with the line count.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .bounds import Method
from .empirical import ArmSample
from .errors import (
    IGNORED_POST_DECISION,
    TIE_PERTURBED,
    ConfigError,
    CorruptSnapshot,
    MalformedEvent,
    MissingValue,
    OutOfOrderTimestamp,
    VersionMismatch,
)
from .testing import Decision, Evaluation, Hypothesis, TestConfig, TestState, Verdict, update
from .twosample import PooledSample, RunningIntersection, ScalarInterval

FORMAT_VERSION = 1
MODES = ("measurement", "count")
ARMS = ("a", "b")


@dataclass(frozen=True)
class Event:
    arm: str
    value: Optional[float]
    ts: float


def _number(obj, key, lineno):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise MalformedEvent(f"line {lineno}: field {key!r} must be a finite number")
    return float(v)


def parse_event(line: str, mode: str = "measurement", lineno: Optional[int] = None) -> Event:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedEvent(f"line {lineno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedEvent(f"line {lineno}: expected a JSON object")
    arm = obj.get("arm")
    if not isinstance(arm, str) or arm.lower() not in ARMS:
        raise MalformedEvent(f"line {lineno}: arm must be 'a' or 'b', got {arm!r}")
    if "ts" not in obj:
        raise MalformedEvent(f"line {lineno}: missing ts")
    ts = _number(obj, "ts", lineno)
    if ts < 0:
        raise MalformedEvent(f"line {lineno}: ts must be non-negative")
    value = None
    if mode == "measurement":
        if obj.get("value") is None:
            raise MissingValue(f"line {lineno}: measurement events need a value")
        value = _number(obj, "value", lineno)
    return Event(arm.lower(), value, ts)


def read_events(lines: Iterable[str], mode: str = "measurement") -> Iterator[Event]:
    for i, line in enumerate(lines, start=1):
        if line.strip():
            yield parse_event(line, mode, i)


@dataclass
class TestSnapshot:
    """Everything needed to resume a monitored test exactly where it stopped."""

    config: TestConfig
    mode: str = "measurement"
    cadence: int = 1
    out_of_order: str = "reject"  # or "sort"
    tie_epsilon: float = 1e-9
    state: TestState = None
    samples: dict = field(default_factory=lambda: {"a": ArmSample(), "b": ArmSample()})
    timestamps: dict = field(default_factory=lambda: {"a": [], "b": []})
    accepted: dict = field(default_factory=lambda: {"a": 0, "b": 0})
    last_raw: dict = field(default_factory=lambda: {"a": None, "b": None})
    ignored: int = 0
    since_eval: int = 0
    last_t: Optional[float] = None
    diagnostics: list = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    __test__ = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.out_of_order not in ("reject", "sort"):
            raise ConfigError("out_of_order must be 'reject' or 'sort'")
        if self.cadence < 1:
            raise ConfigError("cadence must be >= 1")
        if self.state is None:
            self.state = TestState(self.config)
        self._pooled = PooledSample(self.samples["a"], self.samples["b"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TestSnapshot):
            return NotImplemented
        return list(self.to_lines()) == list(other.to_lines())

    @property
    def decided(self) -> bool:
        return self.state.frozen

    def _note(self, flag: str) -> None:
        if flag not in self.diagnostics:
            self.diagnostics.append(flag)

    # -- event application --------------------------------------------------

    def _add_gap(self, arm: str, gap: float) -> None:
        self.samples[arm].add(gap)
        self._pooled.add(arm, gap)

    def _remove_gap(self, arm: str, gap: float) -> None:
        self.samples[arm].remove(gap)
        self._pooled.remove(arm, gap)

    def _after(self, t: float) -> float:
        return max(t + self.tie_epsilon, math.nextafter(t, math.inf))

    def _apply_count(self, arm: str, ts: float) -> None:
        times = self.timestamps[arm]
        last = self.last_raw[arm]
        self.last_raw[arm] = ts if last is None else max(last, ts)
        if self.out_of_order == "reject":
            if last is not None and ts < last:
                raise OutOfOrderTimestamp(f"arm {arm}: {ts} < {last}")
            if times and ts <= times[-1]:
                # simultaneous events would give a zero gap; nudge past the
                # latest (possibly already nudged) stamp, keeping input order
                ts = self._after(times[-1])
                self._note(TIE_PERTURBED)
            i = len(times)
        else:
            i = bisect.bisect_left(times, ts)
            while i < len(times) and times[i] == ts:
                ts = self._after(ts)
                self._note(TIE_PERTURBED)
                i = bisect.bisect_left(times, ts)
        prev = times[i - 1] if i > 0 else None
        nxt = times[i] if i < len(times) else None
        if prev is not None and nxt is not None:
            self._remove_gap(arm, nxt - prev)
        if prev is not None:
            self._add_gap(arm, ts - prev)
        if nxt is not None:
            self._add_gap(arm, nxt - ts)
        times.insert(i, ts)

    def apply(self, e: Event) -> Optional[Evaluation]:
        """Ingest one event; returns the decision record if an evaluation ran."""
        if self.decided:
            self.ignored += 1
            self._note(IGNORED_POST_DECISION)
            return None
        if e.arm not in ARMS:
            raise MalformedEvent(f"unknown arm {e.arm!r}")
        if self.mode == "measurement":
            if e.value is None:
                raise MissingValue("measurement events need a value")
            self.samples[e.arm].add(e.value)
            self._pooled.add(e.arm, e.value)
        else:
            self._apply_count(e.arm, e.ts)
        self.accepted[e.arm] += 1
        self.last_t = e.ts if self.last_t is None else max(self.last_t, e.ts)
        self.since_eval += 1
        if self.since_eval >= self.cadence:
            return self.evaluate()
        return None

    def evaluate(self) -> Optional[Evaluation]:
        a, b = self.samples["a"], self.samples["b"]
        if self.decided or min(a.n, b.n) < self.config.epsilon.n_min:
            return None
        self.since_eval = 0
        update(self.state, a, b, t=self.last_t, pooled=self._pooled)
        return self.state.last

    def flush(self) -> Optional[Evaluation]:
        """Evaluate pending events left over by the cadence (end of stream)."""
        if self.since_eval:
            return self.evaluate()
        return None

    # -- persistence --------------------------------------------------------

    def to_lines(self) -> Iterator[str]:
        header = {
            "format_version": self.format_version,
            "kind": "seqcanary.snapshot",
            "mode": self.mode,
            "cadence": self.cadence,
            "out_of_order": self.out_of_order,
            "tie_epsilon": self.tie_epsilon,
            "config": _config_to_dict(self.config),
            "state": _state_to_dict(self.state),
            "accepted": self.accepted,
            "last_raw": self.last_raw,
            "ignored": self.ignored,
            "since_eval": self.since_eval,
            "last_t": self.last_t,
            "diagnostics": self.diagnostics,
        }
        yield json.dumps(header, sort_keys=True)
        count = 0
        for arm in ARMS:
            if self.mode == "measurement":
                for v in self.samples[arm].values:
                    count += 1
                    yield json.dumps({"arm": arm, "v": float(v)})
            else:
                for ts in self.timestamps[arm]:
                    count += 1
                    yield json.dumps({"arm": arm, "ts": ts})
        yield json.dumps({"end": True, "records": count})

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "TestSnapshot":
        lines = [ln for ln in lines if ln.strip()]
        try:
            header = json.loads(lines[0])
        except (IndexError, json.JSONDecodeError):
            raise CorruptSnapshot("unreadable header") from None
        version = header.get("format_version") if isinstance(header, dict) else None
        if version is None:
            raise CorruptSnapshot("format_version missing")
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"snapshot version {version}, expected {FORMAT_VERSION}")
        try:
            trailer = json.loads(lines[-1])
            if not trailer.get("end") or trailer.get("records") != len(lines) - 2:
                raise CorruptSnapshot("truncated snapshot")
            mode = header["mode"]
            values = {"a": [], "b": []}
            for ln in lines[1:-1]:
                rec = json.loads(ln)
                values[rec["arm"]].append(rec["v"] if mode == "measurement" else rec["ts"])
            config = _config_from_dict(header["config"])
            snap = cls(
                config=config,
                mode=mode,
                cadence=header["cadence"],
                out_of_order=header["out_of_order"],
                tie_epsilon=header["tie_epsilon"],
                state=_state_from_dict(header["state"], config),
                accepted=header["accepted"],
                last_raw=header["last_raw"],
                ignored=header["ignored"],
                since_eval=header["since_eval"],
                last_t=header["last_t"],
                diagnostics=header["diagnostics"],
            )
        except CorruptSnapshot:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CorruptSnapshot(str(exc)) from None
        if mode == "measurement":
            snap.samples = {arm: ArmSample(values[arm]) for arm in ARMS}
        else:
            snap.timestamps = {arm: sorted(values[arm]) for arm in ARMS}
            snap.samples = {
                arm: ArmSample([t1 - t0 for t0, t1 in zip(ts, ts[1:])])
                for arm, ts in snap.timestamps.items()
            }
        snap._pooled = PooledSample(snap.samples["a"], snap.samples["b"])
        return snap


def apply_event(snapshot: TestSnapshot, e: Event) -> TestSnapshot:
    snapshot.apply(e)
    return snapshot


def save_snapshot(snapshot: TestSnapshot, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(snapshot.to_lines()) + "\n")
    tmp.replace(path)


def load_snapshot(path) -> TestSnapshot:
    return TestSnapshot.from_lines(Path(path).read_text().splitlines())


# -- (de)serialisation helpers ----------------------------------------------

def _config_to_dict(c: TestConfig) -> dict:
    return {"hypothesis": c.hypothesis.value, "alpha": c.alpha, "tau": c.tau,
            "method": c.method.value, "n_star": c.n_star}


def _config_from_dict(d: dict) -> TestConfig:
    return TestConfig(Hypothesis(d["hypothesis"]), d["alpha"], d["tau"], Method(d["method"]), d["n_star"])


def _finite_or_none(x):
    return x if x is None or math.isfinite(x) else None


def _interval_to_list(r: RunningIntersection):
    return [_finite_or_none(r.current.lo), _finite_or_none(r.current.hi), r.count_updates, list(r.flags)]


def _interval_from_list(v) -> RunningIntersection:
    lo = -math.inf if v[0] is None else v[0]
    hi = math.inf if v[1] is None else v[1]
    return RunningIntersection(ScalarInterval(lo, hi), v[2], tuple(v[3]))


def _evaluation_from_dict(d):
    if d is None:
        return None
    d = dict(d)
    d["decision"] = Verdict(d["decision"])
    return Evaluation(**d)


def _state_to_dict(s: TestState) -> dict:
    decided = None
    if s.decided_at is not None:
        dec = s.decided_at
        decided = {
            "verdict": dec.verdict.value, "p_at_decision": dec.p_at_decision,
            "n_a": dec.n_a, "n_b": dec.n_b, "t": dec.t,
            "bounds": {k: [v.lo, v.hi] for k, v in dec.bounds_snapshot.items()},
        }
    return {
        "q": s.q, "n_a": s.n_a, "n_b": s.n_b, "decision": s.decision.value,
        "decided_at": decided, "evaluations": s.evaluations,
        "last": None if s.last is None else s.last.as_dict(),
        "sup_cs": _interval_to_list(s.sup_cs), "inf_cs": _interval_to_list(s.inf_cs),
        "norm_cs": _interval_to_list(s.norm_cs), "diagnostics": list(s.diagnostics),
    }


def _state_from_dict(d: dict, config: TestConfig) -> TestState:
    decided = None
    if d["decided_at"] is not None:
        dd = d["decided_at"]
        decided = Decision(Verdict(dd["verdict"]), dd["p_at_decision"], dd["n_a"], dd["n_b"], dd["t"],
                           {k: ScalarInterval(*v) for k, v in dd["bounds"].items()})
    return TestState(
        config=config, q=d["q"], n_a=d["n_a"], n_b=d["n_b"], decision=Verdict(d["decision"]),
        decided_at=decided, last=_evaluation_from_dict(d["last"]), evaluations=d["evaluations"],
        sup_cs=_interval_from_list(d["sup_cs"]), inf_cs=_interval_from_list(d["inf_cs"]),
        norm_cs=_interval_from_list(d["norm_cs"]), diagnostics=list(d["diagnostics"]),
    )
