"""Sorted per-arm samples and exact empirical distribution/quantile functions.

Extended reals are plain floats: ``-math.inf`` and ``math.inf`` act as the
sentinels below/above every finite value.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import EmptySample, InvalidProbability

NEG_INF = -math.inf
POS_INF = math.inf


class ArmSample:
    """Ordered multiset of one arm's observations.

    Values live in a sorted float array; insertion is a binary search plus a
    copy, which keeps order statistics O(1).
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float] = ()):
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                         dtype=float)
        if arr.ndim != 1:
            arr = arr.ravel()
        if np.isnan(arr).any():
            raise ValueError("NaN observations are not allowed")
        self._values = np.sort(arr)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, ArmSample):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"ArmSample(n={self.n})"

    def add(self, x: float) -> None:
        x = float(x)
        if math.isnan(x):
            raise ValueError("NaN observations are not allowed")
        i = int(np.searchsorted(self._values, x, side="right"))
        self._values = np.insert(self._values, i, x)

    def extend(self, xs: Iterable[float]) -> None:
        extra = np.asarray(list(xs), dtype=float)
        if np.isnan(extra).any():
            raise ValueError("NaN observations are not allowed")
        self._values = np.sort(np.concatenate([self._values, extra]), kind="mergesort")

    def remove(self, x: float) -> None:
        i = int(np.searchsorted(self._values, x, side="left"))
        if i >= self.n or self._values[i] != x:
            raise KeyError(x)
        self._values = np.delete(self._values, i)

    def copy(self) -> "ArmSample":
        out = ArmSample()
        out._values = self._values.copy()
        return out


def _require(s: ArmSample) -> None:
    if s.n == 0:
        raise EmptySample("arm sample has no observations")


def ecdf_at(s: ArmSample, x):
    """F_n(x) = #{values <= x} / n. Accepts a scalar or an array of points."""
    _require(s)
    counts = np.searchsorted(s.values, x, side="right")
    if np.ndim(counts) == 0:
        return int(counts) / s.n
    return counts / s.n


def upper_quantile(s: ArmSample, p: float) -> float:
    """sup{x : F_n(x) <= p}, the (floor(n p) + 1)-th order statistic."""
    _require(s)
    if p < 0:
        return NEG_INF
    if p >= 1:
        return POS_INF
    k = math.floor(s.n * p) + 1
    if k > s.n:
        return POS_INF
    return float(s.values[k - 1])


def lower_quantile(s: ArmSample, p: float) -> float:
    """Left-continuous inverse: the ceil(n p)-th order statistic, -inf for p <= 0."""
    _require(s)
    if p > 1:
        raise InvalidProbability(f"p={p} exceeds 1")
    if p <= 0:
        return NEG_INF
    k = max(1, math.ceil(s.n * p))
    return float(s.values[min(k, s.n) - 1])


def merged_grid(a: ArmSample, b: ArmSample) -> np.ndarray:
    """Sorted distinct union of both samples' values."""
    _require(a)
    _require(b)
    return np.union1d(a.values, b.values)
