"""Distribution-shape estimators feeding the cloud layouts.

Gaussian kernel density estimates, uniform histogram binning with the
Sturges and Freedman-Diaconis rules, and quantile-dot quantization.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import EmptySample, InsufficientData, InvalidParameter
from .stats import Sample, as_sample, quantile, summarize

__all__ = [
    "BinRule",
    "DensityEstimate",
    "HistogramBins",
    "QuantileDots",
    "silverman_bandwidth",
    "kde",
    "bin_count",
    "histogram",
    "quantile_dots",
    "count_modes",
]

DEFAULT_GRID_SIZE = 256
# refinement ceiling for narrow kernels on wide data
MAX_GRID_SIZE = 4096
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class BinRule(str, Enum):
    STURGES = "sturges"
    FREEDMAN_DIACONIS = "freedman_diaconis"


@dataclass(frozen=True)
class DensityEstimate:
    x: np.ndarray
    density: np.ndarray
    bandwidth: float
    kernel: str = "gaussian"

    @property
    def grid(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.density.tolist()))

    def integral(self) -> float:
        """Trapezoidal integral of the density over its grid."""
        d = self.density
        dx = np.diff(self.x)
        return float(np.sum(dx * (d[1:] + d[:-1]) / 2.0))


@dataclass(frozen=True)
class HistogramBins:
    edges: tuple[float, ...]
    counts: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class QuantileDots:
    values: tuple[float, ...]

    @property
    def n_dots(self) -> int:
        return len(self.values)


def _degenerate_bandwidth(sample: Sample) -> float:
    scale = max(abs(sample.values[0]), abs(sample.values[-1]), 1.0)
    return scale * 1e-3


def silverman_bandwidth(sample) -> float:
    """Silverman's rule of thumb, ``0.9 * min(sd, IQR / 1.34) * n ** -0.2``.

    When only one of ``sd`` and ``IQR / 1.34`` is zero the other is used;
    when both vanish a small bandwidth proportional to the data magnitude
    is returned so the estimate stays defined.
    """
    sample = as_sample(sample)
    n = len(sample)
    if n < 2:
        raise InsufficientData(f"bandwidth needs at least 2 values, got {n}")
    s = summarize(sample)
    spread = [a for a in (s.sd, s.iqr / 1.34) if a > 0]
    if not spread:
        return _degenerate_bandwidth(sample)
    return 0.9 * min(spread) * n ** -0.2


def _gaussian_mixture(values: np.ndarray, x: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(x)
    # chunk over data to bound memory for large samples
    for start in range(0, len(values), 2048):
        v = values[start:start + 2048]
        z = (x[None, :] - v[:, None]) / h
        with np.errstate(over="ignore"):  # z * z -> inf just means exp(...) -> 0
            out += np.exp(-0.5 * z * z).sum(axis=0)
    return out / (len(values) * h * _SQRT_2PI)


def kde(sample, bandwidth: Optional[float] = None, grid_size: int = DEFAULT_GRID_SIZE) -> DensityEstimate:
    """Gaussian KDE on a uniform grid spanning ``[min - 3h, max + 3h]``.

    ``grid_size`` is a floor. When the data span many bandwidths the grid is
    refined until its spacing is at most ``h`` (up to ``MAX_GRID_SIZE``
    points), which keeps the trapezoidal integral near one.
    """
    sample = as_sample(sample)
    if len(sample) == 0:
        raise EmptySample()
    if grid_size < 2:
        raise InvalidParameter(f"grid_size must be at least 2, got {grid_size}")
    if bandwidth is None:
        h = silverman_bandwidth(sample) if len(sample) >= 2 else _degenerate_bandwidth(sample)
    else:
        h = float(bandwidth)
        if not (h > 0 and math.isfinite(h)):
            raise InvalidParameter(f"bandwidth must be positive, got {bandwidth}")
    values = np.asarray(sample.values, dtype=float)
    lo, hi = values[0] - 3 * h, values[-1] + 3 * h
    cells = (hi - lo) / h
    needed = MAX_GRID_SIZE if cells >= MAX_GRID_SIZE else math.ceil(cells) + 1
    x = np.linspace(lo, hi, max(grid_size, min(needed, MAX_GRID_SIZE)))
    return DensityEstimate(x=x, density=_gaussian_mixture(values, x, h), bandwidth=h)


def count_modes(density) -> int:
    """Number of local maxima, treating plateaus as a single peak."""
    modes = 0
    trend = 0
    for step in np.diff(np.asarray(density, dtype=float)):
        if step > 0:
            trend = 1
        elif step < 0:
            if trend == 1:
                modes += 1
            trend = -1
    return modes + (trend == 1)


def bin_count(sample, rule=BinRule.STURGES) -> int:
    sample = as_sample(sample)
    n = len(sample)
    if n == 0:
        raise EmptySample()
    rule = BinRule(rule)
    sturges = math.ceil(math.log2(n)) + 1
    if rule is BinRule.STURGES:
        return sturges
    iqr = quantile(sample, 0.75) - quantile(sample, 0.25)
    if n < 2 or iqr <= 0:
        return sturges
    width = 2.0 * iqr * n ** (-1.0 / 3.0)
    return max(1, math.ceil((sample.max - sample.min) / width))


def histogram(sample, rule_or_k: Union[BinRule, str, int] = BinRule.STURGES) -> HistogramBins:
    """Uniform-width bins spanning exactly ``[min, max]``.

    Bins are right-open except the last, which includes ``max``. A
    zero-range sample yields one unit-wide bin centred on the value.
    """
    sample = as_sample(sample)
    if len(sample) == 0:
        raise EmptySample()
    if isinstance(rule_or_k, (int, np.integer)) and not isinstance(rule_or_k, bool):
        k = int(rule_or_k)
        if k < 1:
            raise InvalidParameter(f"bin count must be at least 1, got {k}")
    else:
        k = bin_count(sample, rule_or_k)

    lo, hi = sample.min, sample.max
    if lo == hi:
        return HistogramBins((lo - 0.5, hi + 0.5), (len(sample),))

    width = (hi - lo) / k
    edges = [lo + i * width for i in range(k)] + [hi]
    counts = [0] * k
    for v in sample.values:
        i = bisect.bisect_right(edges, v) - 1
        counts[min(max(i, 0), k - 1)] += 1
    return HistogramBins(tuple(edges), tuple(counts))


def quantile_dots(sample, n_dots: int = 20) -> QuantileDots:
    """``n_dots`` quantiles at the midpoint probabilities ``(i + 0.5) / n_dots``."""
    if n_dots < 1:
        raise InvalidParameter(f"n_dots must be at least 1, got {n_dots}")
    sample = as_sample(sample)
    if len(sample) == 0:
        raise EmptySample()
    return QuantileDots(tuple(quantile(sample, (i + 0.5) / n_dots) for i in range(n_dots)))
