"""Simultaneous two-arm bands, the band on d = F_b - F_a, and derived intervals.

Every band is evaluated on the merged grid plus one point below the smallest
observation, where both ECDFs are 0 but the clamped band edges are not.
Step functions built from the two samples are constant between grid points,
so suprema and infima over the real line are exact on this grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import BandCurve, BandKind, EpsilonSpec, epsilon
from .empirical import NEG_INF, ArmSample, merged_grid
from .errors import EMPTY_INTERSECTION, EmptySample


@dataclass(frozen=True)
class ScalarInterval:
    lo: float
    hi: float

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass
class DiffBand:
    grid: np.ndarray  # grid[0] is the below-minimum sentinel (-inf)
    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    d: np.ndarray  # empirical F_{n_b} - F_{n_a} on the grid
    eps_a: float
    eps_b: float
    n_a: int
    n_b: int


@dataclass(frozen=True)
class BandExtremes:
    """Scalars of a difference band that the stopping rules need."""

    sup_lower: float
    sup_upper: float
    inf_lower: float
    inf_upper: float
    d_plus: float  # sup of max(d_n, 0)
    d_minus: float  # sup of max(-d_n, 0)


def arm_radii(a: ArmSample, b: ArmSample, spec: EpsilonSpec) -> tuple[float, float]:
    """Per-arm radii at alpha/2 (the union-bound split)."""
    half = spec.with_alpha(spec.alpha / 2)
    return epsilon(half, a.n), epsilon(half, b.n)


def _check(a: ArmSample, b: ArmSample) -> None:
    if a.n == 0 or b.n == 0:
        raise EmptySample("both arms need at least one observation")


def _ecdfs(a: ArmSample, b: ArmSample, points: np.ndarray):
    fa = np.searchsorted(a.values, points, side="right") / a.n
    fb = np.searchsorted(b.values, points, side="right") / b.n
    return fa, fb


def _edges(fa, fb, eps_a, eps_b):
    lower = np.maximum(0.0, fb - eps_b) - np.minimum(1.0, fa + eps_a)
    upper = np.minimum(1.0, fb + eps_b) - np.maximum(0.0, fa - eps_a)
    return lower, upper


def difference_norms(a: ArmSample, b: ArmSample) -> tuple[float, float]:
    """(sup d_n^+, sup d_n^-) for d_n = F_{n_b} - F_{n_a}."""
    _check(a, b)
    points = np.concatenate((a.values, b.values))
    fa, fb = _ecdfs(a, b, points)
    d = fb - fa
    return max(0.0, float(d.max())), max(0.0, float(-d.min()))


def supnorm_distance(a: ArmSample, b: ArmSample) -> float:
    """||F_{n_b} - F_{n_a}||_inf; the two-sample KS statistic."""
    return max(difference_norms(a, b))


class PooledSample:
    """Both arms' observations in one sorted array with arm labels.

    Kept in step with the two ArmSamples by the monitoring loops; one
    cumulative sum then yields both ECDFs on the merged grid in linear time.
    """

    def __init__(self, a: ArmSample | None = None, b: ArmSample | None = None):
        av = a.values if a is not None else np.empty(0)
        bv = b.values if b is not None else np.empty(0)
        v = np.concatenate((av, bv))
        order = np.argsort(v, kind="stable")
        self.values = v[order]
        self.from_b = order >= av.size
        self.n_a = int(av.size)
        self.n_b = int(bv.size)

    def add(self, arm: str, x: float) -> None:
        i = int(np.searchsorted(self.values, x, side="right"))
        self.values = np.insert(self.values, i, x)
        self.from_b = np.insert(self.from_b, i, arm == "b")
        if arm == "b":
            self.n_b += 1
        else:
            self.n_a += 1

    def remove(self, arm: str, x: float) -> None:
        lo = int(np.searchsorted(self.values, x, side="left"))
        hi = int(np.searchsorted(self.values, x, side="right"))
        hits = np.flatnonzero(self.from_b[lo:hi] == (arm == "b"))
        if hits.size == 0:
            raise KeyError(x)
        i = lo + int(hits[0])
        self.values = np.delete(self.values, i)
        self.from_b = np.delete(self.from_b, i)
        if arm == "b":
            self.n_b -= 1
        else:
            self.n_a -= 1

    def ecdfs(self) -> tuple[np.ndarray, np.ndarray]:
        """(F_a, F_b) at each distinct pooled value."""
        cb = np.cumsum(self.from_b)
        ca = np.arange(1, self.values.size + 1) - cb
        keep = np.empty(self.values.size, dtype=bool)
        keep[-1] = True
        np.not_equal(self.values[1:], self.values[:-1], out=keep[:-1])
        return ca[keep] / self.n_a, cb[keep] / self.n_b


def band_extremes(a: ArmSample, b: ArmSample, spec: EpsilonSpec,
                  pooled: PooledSample | None = None) -> BandExtremes:
    """Sup/inf of both band edges without materialising a sorted grid."""
    _check(a, b)
    eps_a, eps_b = arm_radii(a, b, spec)
    if pooled is not None:
        if pooled.n_a != a.n or pooled.n_b != b.n:
            raise ValueError("pooled index is out of step with the arm samples")
        fa, fb = pooled.ecdfs()
    else:
        fa, fb = _ecdfs(a, b, np.concatenate((a.values, b.values)))
    return _extremes(fa, fb, eps_a, eps_b)


def extremes_for_radii(a: ArmSample, b: ArmSample, eps_a: float, eps_b: float) -> BandExtremes:
    fa, fb = _ecdfs(a, b, np.concatenate((a.values, b.values)))
    return _extremes(fa, fb, eps_a, eps_b)


def _extremes(fa, fb, eps_a, eps_b) -> BandExtremes:
    lower, upper = _edges(fa, fb, eps_a, eps_b)
    # below-min sentinel: both ECDFs are 0
    s_lo = -min(1.0, eps_a)
    s_hi = min(1.0, eps_b)
    d = fb - fa
    return BandExtremes(
        sup_lower=max(float(lower.max()), s_lo),
        sup_upper=max(float(upper.max()), s_hi),
        inf_lower=min(float(lower.min()), s_lo),
        inf_upper=min(float(upper.min()), s_hi),
        d_plus=max(0.0, float(d.max())),
        d_minus=max(0.0, float(-d.min())),
    )


def diff_band(a: ArmSample, b: ArmSample, spec: EpsilonSpec) -> DiffBand:
    """d^u = F_b^u - F_a^l and d^l = F_b^l - F_a^u, each arm at alpha/2."""
    _check(a, b)
    eps_a, eps_b = arm_radii(a, b, spec)
    grid = np.concatenate(([NEG_INF], merged_grid(a, b)))
    fa, fb = _ecdfs(a, b, grid)
    lower, upper = _edges(fa, fb, eps_a, eps_b)
    return DiffBand(grid, lower, upper, spec.alpha, fb - fa, eps_a, eps_b, a.n, b.n)


def extremes(band: DiffBand) -> BandExtremes:
    return BandExtremes(
        sup_lower=float(band.lower.max()),
        sup_upper=float(band.upper.max()),
        inf_lower=float(band.lower.min()),
        inf_upper=float(band.upper.min()),
        d_plus=max(0.0, float(band.d.max())),
        d_minus=max(0.0, float(-band.d.min())),
    )


def sup_inf_intervals(band: DiffBand | BandExtremes) -> tuple[ScalarInterval, ScalarInterval]:
    ex = band if isinstance(band, BandExtremes) else extremes(band)
    return (ScalarInterval(ex.sup_lower, ex.sup_upper),
            ScalarInterval(ex.inf_lower, ex.inf_upper))


def supnorm_interval(band: DiffBand | BandExtremes) -> ScalarInterval:
    """Confidence interval for ||F_b - F_a||_inf.

    The lower end only counts a band edge that excludes zero: a positive
    sup of the lower edge or a negative inf of the upper edge. Taking the
    absolute value of an edge that straddles zero would not bound the norm.
    """
    ex = band if isinstance(band, BandExtremes) else extremes(band)
    lo = max(0.0, ex.sup_lower, -ex.inf_upper)
    hi = max(abs(ex.inf_lower), abs(ex.sup_upper))
    return ScalarInterval(lo, hi)


def abs_diff_band(band: DiffBand) -> BandCurve:
    """Pointwise image of [d^l, d^u] under x -> |x|."""
    lo, hi = band.lower, band.upper
    same_sign = np.sign(lo) == np.sign(hi)
    lower = np.where(same_sign, np.minimum(np.abs(lo), np.abs(hi)), 0.0)
    upper = np.maximum(np.abs(lo), np.abs(hi))
    return BandCurve(band.grid, lower, upper, band.alpha, BandKind.ABS_DIFF)


def band_curve(band: DiffBand) -> BandCurve:
    return BandCurve(band.grid, band.lower, band.upper, band.alpha, BandKind.DIFF)


@dataclass(frozen=True)
class RunningIntersection:
    current: ScalarInterval = ScalarInterval(-np.inf, np.inf)
    count_updates: int = 0
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def empty_seen(self) -> bool:
        return EMPTY_INTERSECTION in self.flags


def update_running(r: RunningIntersection, nxt: ScalarInterval) -> RunningIntersection:
    lo = max(r.current.lo, nxt.lo)
    hi = min(r.current.hi, nxt.hi)
    flags = r.flags
    if lo > hi:
        lo = hi = (lo + hi) / 2
        if EMPTY_INTERSECTION not in flags:
            flags = flags + (EMPTY_INTERSECTION,)
    return replace(r, current=ScalarInterval(lo, hi), count_updates=r.count_updates + 1, flags=flags)
