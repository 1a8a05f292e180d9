"""Band radii for fixed-n and time-uniform regimes, and one-sample bands."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .empirical import ArmSample, ecdf_at, lower_quantile, upper_quantile
from .errors import BelowNStar, ConfigError, InvalidProbability


class Method(str, Enum):
    FIXED_DKWM = "fixed"
    DARLING_ROBBINS = "darling"
    SZORENYI = "szorenyi"
    HOWARD = "howard"

    @property
    def sequential(self) -> bool:
        return self is not Method.FIXED_DKWM


class BandKind(str, Enum):
    CDF = "cdf"
    QUANTILE = "quantile"
    DIFF = "diff"
    ABS_DIFF = "abs_diff"


@dataclass(frozen=True)
class EpsilonSpec:
    method: Method = Method.HOWARD
    alpha: float = 0.05
    n_star: int = 2

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.method is Method.DARLING_ROBBINS and self.n_star < 2:
            raise ConfigError(f"n_star must be >= 2, got {self.n_star}")

    @property
    def n_min(self) -> int:
        return self.n_star if self.method is Method.DARLING_ROBBINS else 1

    def with_alpha(self, alpha: float) -> "EpsilonSpec":
        return replace(self, alpha=alpha)


def radius(method: Method, alpha: float, n: int, n_star: int = 2) -> float:
    """Band radius without EpsilonSpec validation; alpha may be any positive value.

    The p-value root finder evaluates this at alpha/2 for alpha up to 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if method is Method.FIXED_DKWM:
        return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))
    if method is Method.HOWARD:
        return 0.85 * math.sqrt((math.log(math.log(math.e * n)) + 0.8 * math.log(1612.0 / alpha)) / n)
    if method is Method.SZORENYI:
        return math.sqrt(math.log(math.pi**2 * n**2 / (3.0 * alpha)) / (2.0 * n))
    if method is Method.DARLING_ROBBINS:
        if n < n_star:
            raise BelowNStar(f"n={n} < n_star={n_star}")
        return math.sqrt((n + 1) * (2.0 * math.log(n) - math.log(alpha * (n_star - 1))) / n**2)
    raise ValueError(method)


def epsilon(spec: EpsilonSpec, n: int) -> float:
    return radius(spec.method, spec.alpha, n, spec.n_star)


def alpha_for_radius(method: Method, r: float, n: int, n_star: int = 2) -> float:
    """Inverse of ``radius`` in alpha: the level whose band radius at ``n`` is ``r``.

    May exceed 1; callers clip.
    """
    if method is Method.FIXED_DKWM:
        return 2.0 * math.exp(-2.0 * n * r * r)
    if method is Method.HOWARD:
        return 1612.0 * math.exp(-((r / 0.85) ** 2 * n - math.log(math.log(math.e * n))) / 0.8)
    if method is Method.SZORENYI:
        return math.pi**2 * n**2 / 3.0 * math.exp(-2.0 * n * r * r)
    if method is Method.DARLING_ROBBINS:
        if n < n_star:
            raise BelowNStar(f"n={n} < n_star={n_star}")
        return n**2 * math.exp(-r * r * n**2 / (n + 1)) / (n_star - 1)
    raise ValueError(method)


@dataclass
class BandCurve:
    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    kind: BandKind

    def __len__(self) -> int:
        return len(self.grid)

    def contains(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return (self.lower <= values) & (values <= self.upper)


def cdf_band(s: ArmSample, spec: EpsilonSpec, grid=None) -> BandCurve:
    """[max(0, F_n - eps), min(1, F_n + eps)] on the sample's distinct values (or ``grid``)."""
    eps = epsilon(spec, s.n)
    x = np.unique(s.values) if grid is None else np.asarray(grid, dtype=float)
    f = ecdf_at(s, x)
    return BandCurve(x, np.maximum(0.0, f - eps), np.minimum(1.0, f + eps), spec.alpha, BandKind.CDF)


DEFAULT_PROBS = np.round(np.arange(1, 100) / 100.0, 2)


def quantile_band(s: ArmSample, spec: EpsilonSpec, probs=None) -> BandCurve:
    """Upper edge Q_n(p + eps), lower edge the left-continuous quantile at p - eps."""
    probs = DEFAULT_PROBS if probs is None else np.asarray(probs, dtype=float)
    if probs.size and (probs.min() < 0 or probs.max() > 1):
        raise InvalidProbability("quantile band probabilities must lie in [0, 1]")
    eps = epsilon(spec, s.n)
    lower = np.array([lower_quantile(s, p - eps) for p in probs], dtype=float)
    upper = np.array([upper_quantile(s, p + eps) for p in probs], dtype=float)
    return BandCurve(probs, lower, upper, spec.alpha, BandKind.QUANTILE)
