"""Descriptive statistics used by the lightning glyphs and shape estimators.

All quantiles use linear interpolation between order statistics (the
"type 7" estimator), so every layer of a raincloud agrees on where the
quartiles are.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .errors import EmptySample, InvalidParameter

__all__ = [
    "Sample",
    "SummaryStats",
    "Interval",
    "IntervalKind",
    "WhiskerRule",
    "quantile",
    "summarize",
    "whisker_bounds",
    "quantile_interval",
    "sd_interval",
]


@dataclass(frozen=True)
class Sample:
    """Sorted, finite data values.

    Build one with :meth:`from_values`, which validates and sorts. The
    constructor itself assumes ``values`` is already a sorted tuple.
    """

    values: tuple[float, ...]
    label: Optional[str] = None

    @classmethod
    def from_values(cls, values: Iterable[float], label: Optional[str] = None) -> "Sample":
        vals = []
        for v in values:
            f = float(v)
            if not math.isfinite(f):
                raise InvalidParameter(f"non-finite value in sample: {v!r}")
            vals.append(f)
        vals.sort()
        return cls(tuple(vals), label)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def min(self) -> float:
        _require_nonempty(self)
        return self.values[0]

    @property
    def max(self) -> float:
        _require_nonempty(self)
        return self.values[-1]


def as_sample(data) -> Sample:
    """Coerce a Sample or any iterable of numbers into a Sample."""
    if isinstance(data, Sample):
        return data
    return Sample.from_values(data)


class IntervalKind(str, Enum):
    WHISKER_IQR = "whisker_iqr"
    WHISKER_RANGE = "whisker_range"
    QUANTILE_MASS = "quantile_mass"
    SD_MULTIPLE = "sd_multiple"


class WhiskerRule(str, Enum):
    IQR_FENCE_CLAMPED = "iqr_fence_clamped"
    FULL_RANGE = "full_range"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    kind: IntervalKind

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidParameter(f"interval lo {self.lo} > hi {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    min: float
    q1: float
    median: float
    q3: float
    max: float
    skewness: float
    excess_kurtosis: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


def _require_nonempty(sample: Sample) -> None:
    if len(sample.values) == 0:
        raise EmptySample()


def quantile(sample, p: float) -> float:
    """Type-7 quantile: linear interpolation at ``h = (n - 1) * p``."""
    sample = as_sample(sample)
    _require_nonempty(sample)
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"quantile probability must lie in [0, 1], got {p}")
    x = sample.values
    h = (len(x) - 1) * p
    lo = math.floor(h)
    if lo >= len(x) - 1:
        return x[-1]
    frac = h - lo
    return x[lo] + frac * (x[lo + 1] - x[lo])


def summarize(sample) -> SummaryStats:
    sample = as_sample(sample)
    _require_nonempty(sample)
    x = sample.values
    n = len(x)
    if x[0] == x[-1]:
        # constant data: moments are 0 by convention so glyphs still draw
        c = x[0]
        return SummaryStats(n, c, 0.0, c, c, c, c, c, 0.0, 0.0)

    mean = math.fsum(x) / n
    dev = [v - mean for v in x]
    ss = math.fsum(d * d for d in dev)
    sd = math.sqrt(ss / (n - 1)) if n > 1 else 0.0
    m2 = ss / n
    m3 = math.fsum(d ** 3 for d in dev) / n
    m4 = math.fsum(d ** 4 for d in dev) / n
    # tiny spreads can underflow m2 ** 2 to zero even when m2 > 0
    if m2 * m2 > 0:
        skew = m3 / m2 ** 1.5
        kurt = m4 / (m2 * m2) - 3.0
    else:
        skew = kurt = 0.0
    return SummaryStats(
        n=n,
        mean=mean,
        sd=sd,
        min=x[0],
        q1=quantile(sample, 0.25),
        median=quantile(sample, 0.5),
        q3=quantile(sample, 0.75),
        max=x[-1],
        skewness=skew,
        excess_kurtosis=kurt,
    )


def whisker_bounds(sample, rule=WhiskerRule.IQR_FENCE_CLAMPED) -> Interval:
    """Whisker extent under the 1.5 IQR fence rule or the full data range.

    With ``iqr_fence_clamped`` the whiskers end at the most extreme data
    values still inside the fences ``q1 - 1.5 IQR`` and ``q3 + 1.5 IQR``.
    """
    sample = as_sample(sample)
    _require_nonempty(sample)
    rule = WhiskerRule(rule)
    x = sample.values
    if rule is WhiskerRule.FULL_RANGE:
        return Interval(x[0], x[-1], IntervalKind.WHISKER_RANGE)

    q1 = quantile(sample, 0.25)
    q3 = quantile(sample, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    lo = next(v for v in x if v >= lo_fence)
    hi = next(v for v in reversed(x) if v <= hi_fence)
    return Interval(lo, hi, IntervalKind.WHISKER_IQR)


def quantile_interval(sample, mass: float) -> Interval:
    """Central interval holding ``mass`` of the sample, e.g. 0.66 or 0.95."""
    if not 0.0 < mass < 1.0:
        raise InvalidParameter(f"interval mass must lie in (0, 1), got {mass}")
    sample = as_sample(sample)
    lo = quantile(sample, (1.0 - mass) / 2.0)
    hi = quantile(sample, (1.0 + mass) / 2.0)
    return Interval(lo, hi, IntervalKind.QUANTILE_MASS)


def sd_interval(stats: SummaryStats, multiple: float = 1.0) -> Interval:
    """``mean -/+ multiple * sd``."""
    if not multiple > 0:
        raise InvalidParameter(f"sd multiple must be positive, got {multiple}")
    half = multiple * stats.sd
    return Interval(stats.mean - half, stats.mean + half, IntervalKind.SD_MULTIPLE)
