"""Pixel-space layouts for the cloud, rain, and lightning components.

Every layout is a pure function of its inputs and returns a list of
:class:`Mark` objects in canvas coordinates (y grows downward). Layouts
that stack dots shrink the dot radius until the tallest stack fits in the
band; they never grow it.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

from .errors import BandTooThin, InvalidParameter
from .rng import SplitMix64, check_seed
from .shape import BinRule, histogram, kde, quantile_dots
from .stats import (
    Interval,
    Sample,
    SummaryStats,
    WhiskerRule,
    as_sample,
    quantile_interval,
    sd_interval,
    summarize,
    whisker_bounds,
)

__all__ = [
    "Role",
    "Shape",
    "Mark",
    "ScaleX",
    "Band",
    "RainKind",
    "CloudKind",
    "LightningKind",
    "RainParams",
    "CloudParams",
    "LightningParams",
    "autosize_dot_radius",
    "layout_strip",
    "layout_dot",
    "layout_jitter",
    "layout_wilkinson",
    "layout_wheat",
    "layout_beeswarm",
    "layout_rain",
    "layout_cloud",
    "layout_lightning",
    "lightning_intervals",
    "heatmap_ramp",
]

RGBA = tuple  # (r, g, b, alpha) with 0-255 channels and alpha in [0, 1]

CLOUD_GRAY: RGBA = (128, 128, 128, 1.0)
RAIN_BLUE: RGBA = (70, 130, 180, 1.0)
LIGHTNING_GOLD: RGBA = (218, 165, 32, 1.0)

QUANTILE_DOT_RADIUS = 5.0
HEATMAP_LEVELS = 64
SKEW_PX_PER_UNIT = 20.0
_OVERLAP_EPS = 1e-9


class Role(str, Enum):
    CLOUD = "cloud"
    RAIN = "rain"
    LIGHTNING = "lightning"


class Shape(str, Enum):
    CIRCLE = "circle"
    RECT = "rect"
    HLINE = "hline"
    VLINE = "vline"
    POLYLINE = "polyline"
    POLYGON = "polygon"


@dataclass(frozen=True)
class Mark:
    """One primitive in pixel space.

    Geometry by shape:

    * circle: ``(cx, cy, r)``
    * rect: ``(x, y, w, h)`` with ``(x, y)`` the top-left corner
    * hline / vline: ``(x0, y0, x1, y1)``
    * polyline / polygon: ``((x, y), ...)``
    """

    shape: Shape
    geometry: tuple
    color: RGBA
    stroke_width: float = 1.0

    def __post_init__(self):
        g = self.geometry
        flat = [c for p in g for c in p] if self.shape in (Shape.POLYLINE, Shape.POLYGON) else list(g)
        if not all(math.isfinite(c) for c in flat):
            raise InvalidParameter(f"non-finite geometry in {self.shape.value} mark: {g}")
        if self.shape is Shape.CIRCLE and g[2] < 0:
            raise InvalidParameter(f"negative radius {g[2]}")
        if self.shape is Shape.RECT and (g[2] < 0 or g[3] < 0):
            raise InvalidParameter(f"negative rect size {g[2:]}")
        if not 0.0 <= self.color[3] <= 1.0:
            raise InvalidParameter(f"alpha must lie in [0, 1], got {self.color[3]}")

    def xs(self) -> list[float]:
        """All x coordinates the mark touches (circle: center only)."""
        g = self.geometry
        if self.shape is Shape.CIRCLE:
            return [g[0]]
        if self.shape is Shape.RECT:
            return [g[0], g[0] + g[2]]
        if self.shape in (Shape.HLINE, Shape.VLINE):
            return [g[0], g[2]]
        return [p[0] for p in g]

    def y_extent(self) -> tuple[float, float]:
        g = self.geometry
        if self.shape is Shape.CIRCLE:
            return g[1] - g[2], g[1] + g[2]
        if self.shape is Shape.RECT:
            return g[1], g[1] + g[3]
        if self.shape in (Shape.HLINE, Shape.VLINE):
            return min(g[1], g[3]), max(g[1], g[3])
        ys = [p[1] for p in g]
        return min(ys), max(ys)


def circle(cx, cy, r, color) -> Mark:
    return Mark(Shape.CIRCLE, (float(cx), float(cy), float(r)), color)


def rect(x, y, w, h, color) -> Mark:
    return Mark(Shape.RECT, (float(x), float(y), float(w), float(h)), color)


def hline(x0, x1, y, color, width=1.0) -> Mark:
    return Mark(Shape.HLINE, (float(x0), float(y), float(x1), float(y)), color, width)


def vline(x, y0, y1, color, width=1.0) -> Mark:
    return Mark(Shape.VLINE, (float(x), float(y0), float(x), float(y1)), color, width)


def polygon(points, color) -> Mark:
    return Mark(Shape.POLYGON, tuple((float(x), float(y)) for x, y in points), color, 0.0)


def polyline(points, color, width=1.0) -> Mark:
    return Mark(Shape.POLYLINE, tuple((float(x), float(y)) for x, y in points), color, width)


@dataclass(frozen=True)
class ScaleX:
    """Affine map from data units to pixel columns."""

    domain_lo: float
    domain_hi: float
    range_lo: float
    range_hi: float

    def __post_init__(self):
        if not self.domain_lo < self.domain_hi:
            raise InvalidParameter(f"degenerate scale domain [{self.domain_lo}, {self.domain_hi}]")

    def apply(self, v: float) -> float:
        t = (v - self.domain_lo) / (self.domain_hi - self.domain_lo)
        return self.range_lo * (1.0 - t) + self.range_hi * t

    def __call__(self, v: float) -> float:
        return self.apply(v)

    @property
    def px_per_unit(self) -> float:
        return (self.range_hi - self.range_lo) / (self.domain_hi - self.domain_lo)


@dataclass(frozen=True)
class Band:
    y_top: float
    y_bottom: float
    role: Role

    def __post_init__(self):
        if not self.y_top < self.y_bottom:
            raise InvalidParameter(f"band top {self.y_top} must be above bottom {self.y_bottom}")

    @property
    def height(self) -> float:
        return self.y_bottom - self.y_top

    @property
    def mid(self) -> float:
        return (self.y_top + self.y_bottom) / 2.0


class RainKind(str, Enum):
    STRIP = "strip"
    DOT = "dot"
    JITTER = "jitter"
    BEESWARM = "beeswarm"
    WILKINSON = "wilkinson"
    WHEAT = "wheat"


class CloudKind(str, Enum):
    DENSITY = "density"
    VIOLIN = "violin"
    SPLIT_BOXPLOT = "split_boxplot"
    HEATMAP = "heatmap"
    HISTOGRAM = "histogram"
    QUANTILE_DOTPLOT = "quantile_dotplot"


class LightningKind(str, Enum):
    BOXPLOT = "boxplot"
    MIDGAP = "midgap"
    QINTERVAL = "qinterval"
    MEAN_MARKER = "mean_marker"
    MEAN_INTERVAL = "mean_interval"
    MOMENT_PLOT = "moment_plot"


@dataclass(frozen=True)
class RainParams:
    kind: RainKind = RainKind.STRIP
    dot_radius: float = 5.0
    opacity: float = 1.0
    wheat_bins: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", RainKind(self.kind))
        if not self.dot_radius > 0:
            raise InvalidParameter(f"dot_radius must be positive, got {self.dot_radius}")
        if not 0.0 < self.opacity <= 1.0:
            raise InvalidParameter(f"opacity must lie in (0, 1], got {self.opacity}")
        if self.wheat_bins is not None and self.wheat_bins < 1:
            raise InvalidParameter(f"wheat_bins must be positive, got {self.wheat_bins}")
        check_seed(self.seed)


@dataclass(frozen=True)
class CloudParams:
    kind: CloudKind = CloudKind.DENSITY
    n_dots: int = 20
    bin_rule: BinRule = BinRule.STURGES
    bandwidth: Optional[float] = None
    # shared vertical scale for density-type clouds across panels
    peak_density: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CloudKind(self.kind))
        object.__setattr__(self, "bin_rule", BinRule(self.bin_rule))
        if self.n_dots < 1:
            raise InvalidParameter(f"n_dots must be positive, got {self.n_dots}")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise InvalidParameter(f"bandwidth must be positive, got {self.bandwidth}")
        if self.peak_density is not None and not self.peak_density > 0:
            raise InvalidParameter(f"peak_density must be positive, got {self.peak_density}")


@dataclass(frozen=True)
class LightningParams:
    kind: LightningKind = LightningKind.BOXPLOT
    sd_multiple: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LightningKind(self.kind))
        if not self.sd_multiple > 0:
            raise InvalidParameter(f"sd_multiple must be positive, got {self.sd_multiple}")


def _with_opacity(color: RGBA, opacity: float) -> RGBA:
    return (color[0], color[1], color[2], color[3] * opacity)


def autosize_dot_radius(max_stack: int, band_height: float, requested_r: float) -> float:
    """Largest radius not above ``requested_r`` that fits ``max_stack`` dots."""
    if max_stack < 1:
        raise InvalidParameter(f"max_stack must be at least 1, got {max_stack}")
    if not band_height > 0:
        raise InvalidParameter(f"band_height must be positive, got {band_height}")
    return min(requested_r, band_height / (2.0 * max_stack))


# --- rain -----------------------------------------------------------------

def layout_strip(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    sample = as_sample(sample)
    c = _with_opacity(color, params.opacity)
    top, bottom = band.y_top + 0.5, band.y_bottom - 0.5
    return [vline(scale(v), top, bottom, c) for v in sample.values]


def layout_dot(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    """Unstacked dots resting on the band bottom; overplotting is kept."""
    sample = as_sample(sample)
    c = _with_opacity(color, params.opacity)
    r = autosize_dot_radius(1, band.height, params.dot_radius)
    y = band.y_bottom - r
    return [circle(scale(v), y, r, c) for v in sample.values]


def layout_jitter(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    """Dots at their exact x with a uniformly random y inside the band."""
    sample = as_sample(sample)
    r = params.dot_radius
    span = band.height - 2.0 * r
    if span < 0:
        raise BandTooThin(f"band of height {band.height} cannot hold dots of radius {r}")
    rng = SplitMix64(params.seed)
    c = _with_opacity(color, params.opacity)
    lo = band.y_top + r
    return [circle(scale(v), lo + rng.uniform() * span, r, c) for v in sample.values]


def wilkinson_columns(xs_px: Sequence[float], r: float) -> list[tuple[float, int]]:
    """Greedy sweep grouping sorted pixel positions into dot columns.

    A position joins the open column when it lies within ``2 r`` of the
    column's running mean; otherwise it opens a new column. Returns
    ``(mean_x, count)`` per column.
    """
    columns = []
    total = 0.0
    count = 0
    for x in xs_px:
        if count and abs(x - total / count) <= 2.0 * r:
            total += x
            count += 1
            continue
        if count:
            columns.append((total / count, count))
        total, count = x, 1
    if count:
        columns.append((total / count, count))
    return columns


def _stacked_columns(xs_px: Sequence[float], band: Band, requested_r: float, color: RGBA) -> list[Mark]:
    r = requested_r
    columns = wilkinson_columns(xs_px, r)
    # membership depends on r, so re-sweep after each shrink until it fits
    while True:
        tallest = max((c for _, c in columns), default=1)
        if tallest * 2.0 * r <= band.height + _OVERLAP_EPS:
            break
        r = autosize_dot_radius(tallest, band.height, r)
        columns = wilkinson_columns(xs_px, r)
    marks = []
    for x, count in columns:
        for i in range(count):
            marks.append(circle(x, band.y_bottom - r - 2.0 * r * i, r, color))
    return marks


def layout_wilkinson(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    """Wilkinson dot plot: stacked columns re-centred on their members' mean."""
    sample = as_sample(sample)
    xs = [scale(v) for v in sample.values]
    return _stacked_columns(xs, band, params.dot_radius, _with_opacity(color, params.opacity))


def _bin_members(sample: Sample, n_bins) -> list[list[float]]:
    bins = histogram(sample, n_bins)
    members: list[list[float]] = [[] for _ in bins.counts]
    last = len(members) - 1
    for v in sample.values:
        i = bisect.bisect_right(bins.edges, v) - 1
        members[min(max(i, 0), last)].append(v)
    return members


def layout_wheat(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    """Wheat plot: exact x, with the i-th value of each bin lifted by ``i * 2r``."""
    sample = as_sample(sample)
    members = _bin_members(sample, params.wheat_bins if params.wheat_bins else BinRule.STURGES)
    fullest = max(len(m) for m in members)
    r = autosize_dot_radius(fullest, band.height, params.dot_radius)
    h = 2.0 * r
    c = _with_opacity(color, params.opacity)
    marks = []
    for values in members:
        for i, v in enumerate(values):
            marks.append(circle(scale(v), band.y_bottom - r - i * h, r, c))
    return marks


def beeswarm_offsets(xs_px: Sequence[float], r: float) -> list[float]:
    """Deterministic swarm: each dot takes the smallest free vertical offset.

    ``xs_px`` must be ascending. Offsets are measured upward from the
    midline; when ``+d`` and ``-d`` are both free the positive one wins.
    """
    diameter = 2.0 * r
    offsets: list[float] = []
    for i, x in enumerate(xs_px):
        blocked = []
        j = i - 1
        while j >= 0 and x - xs_px[j] < diameter:
            dx = x - xs_px[j]
            half = math.sqrt(diameter * diameter - dx * dx)
            blocked.append((offsets[j] - half, offsets[j] + half))
            j -= 1
        if not blocked:
            offsets.append(0.0)
            continue
        candidates = [0.0]
        for lo, hi in blocked:
            candidates.extend((lo, hi))
        candidates.sort(key=lambda y: (abs(y), -y))
        for y in candidates:
            if all(not (lo + _OVERLAP_EPS < y < hi - _OVERLAP_EPS) for lo, hi in blocked):
                offsets.append(y)
                break
    return offsets


def layout_beeswarm(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    sample = as_sample(sample)
    xs = [scale(v) for v in sample.values]
    r = params.dot_radius
    for _ in range(256):
        offsets = beeswarm_offsets(xs, r)
        needed = 2.0 * (max((abs(o) for o in offsets), default=0.0) + r)
        if needed <= band.height + _OVERLAP_EPS:
            break
        stack = math.ceil(needed / (2.0 * r) - _OVERLAP_EPS)
        r = autosize_dot_radius(stack, band.height, r)
    c = _with_opacity(color, params.opacity)
    return [circle(x, band.mid - o, r, c) for x, o in zip(xs, offsets)]


_RAIN_LAYOUTS = {
    RainKind.STRIP: layout_strip,
    RainKind.DOT: layout_dot,
    RainKind.JITTER: layout_jitter,
    RainKind.BEESWARM: layout_beeswarm,
    RainKind.WILKINSON: layout_wilkinson,
    RainKind.WHEAT: layout_wheat,
}


def layout_rain(sample, scale: ScaleX, band: Band, params: RainParams, color: RGBA = RAIN_BLUE) -> list[Mark]:
    return _RAIN_LAYOUTS[params.kind](sample, scale, band, params, color)


# --- cloud ----------------------------------------------------------------

def heatmap_ramp(color: RGBA = CLOUD_GRAY, levels: int = HEATMAP_LEVELS) -> list[RGBA]:
    """Light-to-dark ramp: a pale tint of ``color`` down to half its value.

    Every level maps to a distinct color, and the darkest is reserved for
    the single densest cell.
    """
    light = [c + 0.9 * (255 - c) for c in color[:3]]
    dark = [0.5 * c for c in color[:3]]
    ramp = []
    for level in range(levels + 1):
        t = level / levels
        ramp.append(tuple(int(math.floor(lo + t * (hi - lo) + 0.5)) for lo, hi in zip(light, dark)) + (color[3],))
    return ramp


def _density_heights(est, params: CloudParams) -> list[float]:
    peak = params.peak_density if params.peak_density is not None else float(est.density.max())
    if peak <= 0:
        return [0.0] * len(est.density)
    return [min(d / peak, 1.0) for d in est.density.tolist()]


def _whisker_box(stats: SummaryStats, whiskers: Interval, scale: ScaleX, y0: float, y1: float,
                 y_whisker: float, color: RGBA, width: float) -> list[Mark]:
    q1, med, q3 = scale(stats.q1), scale(stats.median), scale(stats.q3)
    return [
        hline(q1, q3, y0, color, width),
        hline(q1, q3, y1, color, width),
        vline(q1, y0, y1, color, width),
        vline(q3, y0, y1, color, width),
        vline(med, y0, y1, color, width),
        hline(scale(whiskers.lo), q1, y_whisker, color, width),
        hline(q3, scale(whiskers.hi), y_whisker, color, width),
    ]


def layout_cloud(sample, scale: ScaleX, band: Band, params: CloudParams, color: RGBA = CLOUD_GRAY) -> list[Mark]:
    sample = as_sample(sample)
    kind = params.kind
    H = band.height

    if kind in (CloudKind.DENSITY, CloudKind.VIOLIN, CloudKind.HEATMAP):
        est = kde(sample, params.bandwidth)
        heights = _density_heights(est, params)
        xs = [scale(x) for x in est.x.tolist()]
        if kind is CloudKind.DENSITY:
            pts = [(xs[0], band.y_bottom)]
            pts += [(x, band.y_bottom - t * H) for x, t in zip(xs, heights)]
            pts.append((xs[-1], band.y_bottom))
            return [polygon(pts, color)]
        if kind is CloudKind.VIOLIN:
            half = H / 2.0
            upper = [(x, band.mid - t * half) for x, t in zip(xs, heights)]
            lower = [(x, band.mid + t * half) for x, t in zip(reversed(xs), reversed(heights))]
            return [polygon(upper + lower, color)]
        ramp = heatmap_ramp(color)
        top_level = len(ramp) - 1
        levels = [min(int(math.floor(t * top_level)), top_level - 1) for t in heights]
        levels[heights.index(max(heights))] = top_level  # index() picks the leftmost tie
        step = (xs[-1] - xs[0]) / (len(xs) - 1)
        edges = [xs[0] - step / 2.0 + i * step for i in range(len(xs) + 1)]
        return [
            rect(edges[i], band.y_top, edges[i + 1] - edges[i], H, ramp[lv])
            for i, lv in enumerate(levels)
        ]

    if kind is CloudKind.SPLIT_BOXPLOT:
        stats = summarize(sample)
        whiskers = whisker_bounds(sample, WhiskerRule.IQR_FENCE_CLAMPED)
        y0 = band.y_bottom - 0.6 * H
        y1 = band.y_bottom - 1.0
        return _whisker_box(stats, whiskers, scale, y0, y1, band.y_bottom - 0.3 * H, color, 2.0)

    if kind is CloudKind.HISTOGRAM:
        bins = histogram(sample, params.bin_rule)
        tallest = max(bins.counts)
        marks = []
        for i, count in enumerate(bins.counts):
            if count == 0:
                continue
            x0, x1 = scale(bins.edges[i]), scale(bins.edges[i + 1])
            h = count / tallest * H
            w = max(x1 - x0 - 1.0, 0.0)
            marks.append(rect(x0 + 0.5, band.y_bottom - h, w, h, color))
        return marks

    dots = quantile_dots(sample, params.n_dots)
    return _stacked_columns([scale(v) for v in dots.values], band, QUANTILE_DOT_RADIUS, color)


# --- lightning --------------------------------------------------------------

def lightning_intervals(sample) -> dict[str, Interval]:
    """The intervals any lightning glyph may need, keyed by name."""
    sample = as_sample(sample)
    return {
        "whisker_iqr": whisker_bounds(sample, WhiskerRule.IQR_FENCE_CLAMPED),
        "whisker_range": whisker_bounds(sample, WhiskerRule.FULL_RANGE),
        "q66": quantile_interval(sample, 0.66),
        "q95": quantile_interval(sample, 0.95),
    }


def _plus(x, y, size, color, width=2.0) -> list[Mark]:
    return [hline(x - size, x + size, y, color, width), vline(x, y - size, y + size, color, width)]


def _arc(x, y, half_height, opening: int, color) -> Mark:
    """A "(" (opening=+1) or ")" (opening=-1) stroke centred on ``(x, y)``."""
    theta_max = math.pi / 3.0
    radius = half_height / math.sin(theta_max)
    pts = []
    for k in range(9):
        theta = -theta_max + 2.0 * theta_max * k / 8
        pts.append((x + opening * radius * (1.0 - math.cos(theta)), y + radius * math.sin(theta)))
    return polyline(pts, color, 1.5)


def layout_lightning(stats: SummaryStats, intervals: Mapping[str, Interval], scale: ScaleX, band: Band,
                     params: LightningParams, color: RGBA = LIGHTNING_GOLD) -> list[Mark]:
    kind = params.kind
    H = band.height
    ym = band.mid
    mean_x = scale(stats.mean)
    med_x = scale(stats.median)

    if kind is LightningKind.BOXPLOT:
        w = intervals["whisker_iqr"]
        marks = _whisker_box(stats, w, scale, ym - 0.3 * H, ym + 0.3 * H, ym, color, 1.0)
        cap = 0.15 * H
        marks += [vline(scale(w.lo), ym - cap, ym + cap, color), vline(scale(w.hi), ym - cap, ym + cap, color)]
        return marks

    if kind is LightningKind.MIDGAP:
        w = intervals["whisker_iqr"]
        q1, q3 = scale(stats.q1), scale(stats.q3)
        tick = 0.15 * H
        return [
            hline(scale(w.lo), q1, ym, color, 2.0),
            hline(q3, scale(w.hi), ym, color, 2.0),
            vline(q1, ym - tick, ym + tick, color),
            vline(q3, ym - tick, ym + tick, color),
            circle(med_x, ym, min(3.0, 0.2 * H), color),
        ]

    if kind is LightningKind.QINTERVAL:
        q95, q66 = intervals["q95"], intervals["q66"]
        return [
            hline(scale(q95.lo), scale(q95.hi), ym, color, 1.0),
            hline(scale(q66.lo), scale(q66.hi), ym, color, 4.0),
            circle(med_x, ym, min(4.0, 0.25 * H), color),
        ]

    if kind is LightningKind.MEAN_MARKER:
        return _plus(mean_x, ym, min(6.0, 0.4 * H), color)

    if kind is LightningKind.MEAN_INTERVAL:
        iv = sd_interval(stats, params.sd_multiple)
        return [
            hline(scale(iv.lo), scale(iv.hi), ym, color, 2.0),
            circle(mean_x, ym, min(4.0, 0.25 * H), color),
        ]

    # moment plot
    rng = intervals["whisker_range"]
    bh = 0.3 * H
    q1, q3 = scale(stats.q1), scale(stats.q3)
    stub = 4.0
    marks = [hline(scale(rng.lo), scale(rng.hi), ym, color)]
    marks += [
        vline(q1, ym - bh, ym + bh, color),
        hline(q1, q1 + stub, ym - bh, color),
        hline(q1, q1 + stub, ym + bh, color),
        vline(q3, ym - bh, ym + bh, color),
        hline(q3 - stub, q3, ym - bh, color),
        hline(q3 - stub, q3, ym + bh, color),
    ]
    # median as a "T" above and an inverted "T" below the whisker
    marks += [
        hline(med_x - stub, med_x + stub, ym - bh, color, 2.0),
        vline(med_x, ym - bh, ym - bh / 2.0, color, 2.0),
        hline(med_x - stub, med_x + stub, ym + bh, color, 2.0),
        vline(med_x, ym + bh / 2.0, ym + bh, color, 2.0),
    ]
    marks += _plus(mean_x, ym, min(5.0, 0.3 * H), color)
    for k, half in ((1, 0.4 * H), (2, 0.25 * H)):
        marks.append(_arc(scale(stats.mean - k * stats.sd), ym, half, +1, color))
        marks.append(_arc(scale(stats.mean + k * stats.sd), ym, half, -1, color))
    cap = (scale.range_hi - scale.range_lo) / 4.0
    offset = math.copysign(min(abs(stats.skewness) * SKEW_PX_PER_UNIT, cap), stats.skewness)
    tri_y = ym + 0.4 * H
    s = min(4.0, 0.1 * H)
    if stats.skewness == 0:
        tip = mean_x
        tri = [(tip - s, tri_y + s), (tip + s, tri_y + s), (tip, tri_y - s)]
    else:
        direction = 1.0 if offset > 0 else -1.0
        tip = mean_x + offset
        base = tip - direction * 2.0 * s
        tri = [(base, tri_y - s), (base, tri_y + s), (tip, tri_y)]
    marks.append(polygon(tri, color))
    return marks
