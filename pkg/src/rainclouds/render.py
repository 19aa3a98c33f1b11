"""Compose raincloud layers and rasterize them into an RGBA buffer.

Rasterization has no anti-aliasing: a pixel is covered when its center
lies inside the shape, so identical inputs always give identical bytes.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptySample, InvalidParameter
from .layout import (
    CLOUD_GRAY,
    LIGHTNING_GOLD,
    RAIN_BLUE,
    Band,
    CloudParams,
    LightningParams,
    Mark,
    RainParams,
    Role,
    ScaleX,
    Shape,
    layout_cloud,
    layout_lightning,
    layout_rain,
    lightning_intervals,
)
from .stats import as_sample, summarize

__all__ = [
    "Palette",
    "RaincloudSpec",
    "RasterImage",
    "make_scale",
    "panel_bands",
    "layout_raincloud",
    "rasterize",
    "render_raincloud",
    "encode_ppm",
    "write_ppm",
    "write_png",
    "write_image",
]

WHITE = (255, 255, 255, 1.0)


@dataclass(frozen=True)
class Palette:
    cloud: tuple = CLOUD_GRAY
    rain: tuple = RAIN_BLUE
    lightning: tuple = LIGHTNING_GOLD
    background: tuple = WHITE

    def __post_init__(self):
        for name in ("cloud", "rain", "lightning", "background"):
            c = tuple(getattr(self, name))
            if len(c) == 3:
                c = c + (1.0,)
            if len(c) != 4 or not all(0 <= v <= 255 and float(v).is_integer() for v in c[:3]) or not 0 <= c[3] <= 1:
                raise InvalidParameter(f"color {name} must be (r, g, b[, alpha]) with 0-255 ints and alpha in [0, 1]")
            object.__setattr__(self, name, (int(c[0]), int(c[1]), int(c[2]), float(c[3])))

    def for_role(self, role: Role) -> tuple:
        return getattr(self, Role(role).value)


@dataclass(frozen=True)
class RaincloudSpec:
    cloud: CloudParams = field(default_factory=CloudParams)
    rain: RainParams = field(default_factory=RainParams)
    lightning: Optional[LightningParams] = field(default_factory=LightningParams)
    width: int = 400
    height: int = 160
    margin: float = 10.0
    band_fractions: tuple = (0.40, 0.35, 0.25)
    domain: Optional[tuple] = None
    colors: Palette = field(default_factory=Palette)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidParameter(f"canvas must be positive, got {self.width}x{self.height}")
        if self.margin < 0 or 2 * self.margin >= min(self.width, self.height):
            raise InvalidParameter(f"margin {self.margin} leaves no drawing area")
        fr = tuple(float(f) for f in self.band_fractions)
        if len(fr) != 3 or any(f <= 0 for f in fr) or abs(sum(fr) - 1.0) > 1e-9:
            raise InvalidParameter(f"band_fractions must be three positive numbers summing to 1, got {fr}")
        object.__setattr__(self, "band_fractions", fr)
        if self.domain is not None:
            lo, hi = (float(v) for v in self.domain)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidParameter(f"domain must be a finite increasing pair, got {self.domain}")
            object.__setattr__(self, "domain", (lo, hi))

    def with_rain_seed(self, seed: int) -> "RaincloudSpec":
        return replace(self, rain=replace(self.rain, seed=seed))

    @property
    def design(self) -> str:
        light = self.lightning.kind.value if self.lightning else "none"
        return f"{self.cloud.kind.value}-{self.rain.kind.value}-{light}"


class RasterImage:
    """Row-major RGBA8 pixel buffer."""

    __slots__ = ("width", "height", "array")

    def __init__(self, width: int, height: int, array: Optional[np.ndarray] = None):
        self.width = int(width)
        self.height = int(height)
        if array is None:
            array = np.zeros((self.height, self.width, 4), dtype=np.uint8)
        if array.shape != (self.height, self.width, 4) or array.dtype != np.uint8:
            raise InvalidParameter(f"pixel array must be uint8 of shape {(self.height, self.width, 4)}")
        self.array = array

    @classmethod
    def filled(cls, width: int, height: int, color) -> "RasterImage":
        arr = np.empty((height, width, 4), dtype=np.uint8)
        arr[:, :, :3] = color[:3]
        arr[:, :, 3] = 255
        return cls(width, height, arr)

    @property
    def pixels(self) -> bytes:
        return self.array.tobytes()

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.width == other.width and self.height == other.height and np.array_equal(self.array, other.array)

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height})"


def make_scale(sample, spec: RaincloudSpec) -> ScaleX:
    """Data-to-pixel scale: the fixed domain if set, else the sample extent."""
    if spec.domain is not None:
        lo, hi = spec.domain
    else:
        sample = as_sample(sample)
        if len(sample) == 0:
            raise EmptySample()
        lo, hi = sample.min, sample.max
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
    return ScaleX(lo, hi, float(spec.margin), float(spec.width - spec.margin))


def panel_bands(spec: RaincloudSpec) -> dict[Role, Band]:
    """Stacked cloud, rain, and lightning bands, top to bottom."""
    top = float(spec.margin)
    usable = spec.height - 2.0 * spec.margin
    bands = {}
    for role, frac in zip((Role.CLOUD, Role.RAIN, Role.LIGHTNING), spec.band_fractions):
        bottom = top + frac * usable
        bands[role] = Band(top, bottom, role)
        top = bottom
    return bands


def layout_raincloud(sample, spec: RaincloudSpec, layers: Iterable[Role] = tuple(Role)) -> dict[Role, list[Mark]]:
    sample = as_sample(sample)
    if len(sample) == 0:
        raise EmptySample()
    layers = {Role(r) for r in layers}
    scale = make_scale(sample, spec)
    bands = panel_bands(spec)
    out: dict[Role, list[Mark]] = {Role.CLOUD: [], Role.RAIN: [], Role.LIGHTNING: []}
    if Role.CLOUD in layers:
        out[Role.CLOUD] = layout_cloud(sample, scale, bands[Role.CLOUD], spec.cloud, spec.colors.cloud)
    if Role.RAIN in layers:
        out[Role.RAIN] = layout_rain(sample, scale, bands[Role.RAIN], spec.rain, spec.colors.rain)
    if Role.LIGHTNING in layers and spec.lightning is not None:
        out[Role.LIGHTNING] = layout_lightning(
            summarize(sample), lightning_intervals(sample), scale, bands[Role.LIGHTNING],
            spec.lightning, spec.colors.lightning,
        )
    return out


# --- rasterizer -------------------------------------------------------------

def _span(lo: float, hi: float, limit: int) -> tuple[int, int]:
    """Pixel indices whose centers fall in ``[lo, hi)``, clipped to the canvas."""
    a = max(math.ceil(lo - 0.5), 0)
    b = min(math.ceil(hi - 0.5), limit)
    return a, b


def _coverage(mark: Mark, width: int, height: int):
    """Return ``(y0, x0, mask)`` for a mark, or None when nothing is covered."""
    g = mark.geometry
    shape = mark.shape
    if shape is Shape.RECT:
        x0, x1 = _span(g[0], g[0] + g[2], width)
        y0, y1 = _span(g[1], g[1] + g[3], height)
        if x0 >= x1 or y0 >= y1:
            return None
        return y0, x0, np.ones((y1 - y0, x1 - x0), dtype=bool)

    if shape in (Shape.HLINE, Shape.VLINE):
        half = mark.stroke_width / 2.0
        x0, x1 = _span(min(g[0], g[2]) - half, max(g[0], g[2]) + half, width)
        y0, y1 = _span(min(g[1], g[3]) - half, max(g[1], g[3]) + half, height)
        if x0 >= x1 or y0 >= y1:
            return None
        return y0, x0, np.ones((y1 - y0, x1 - x0), dtype=bool)

    if shape is Shape.CIRCLE:
        cx, cy, r = g
        x0, x1 = _span(cx - r, cx + r + 1e-9, width)
        y0, y1 = _span(cy - r, cy + r + 1e-9, height)
        if x0 >= x1 or y0 >= y1:
            return None
        px = np.arange(x0, x1) + 0.5 - cx
        py = np.arange(y0, y1) + 0.5 - cy
        mask = py[:, None] ** 2 + px[None, :] ** 2 <= r * r
        return y0, x0, mask

    pts = np.asarray(g, dtype=float)
    if shape is Shape.POLYLINE:
        half = mark.stroke_width / 2.0
        x0, x1 = _span(pts[:, 0].min() - half, pts[:, 0].max() + half + 1e-9, width)
        y0, y1 = _span(pts[:, 1].min() - half, pts[:, 1].max() + half + 1e-9, height)
        if x0 >= x1 or y0 >= y1:
            return None
        px = (np.arange(x0, x1) + 0.5)[None, :]
        py = (np.arange(y0, y1) + 0.5)[:, None]
        best = np.full((y1 - y0, x1 - x0), np.inf)
        for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
            dx, dy = bx - ax, by - ay
            seg2 = dx * dx + dy * dy
            if seg2 > 0:
                t = np.clip(((px - ax) * dx + (py - ay) * dy) / seg2, 0.0, 1.0)
            else:
                t = 0.0
            d2 = (px - ax - t * dx) ** 2 + (py - ay - t * dy) ** 2
            np.minimum(best, d2, out=best)
        return y0, x0, best <= half * half

    # polygon: even-odd scanline fill over pixel centers
    x0, x1 = _span(pts[:, 0].min(), pts[:, 0].max(), width)
    y0, y1 = _span(pts[:, 1].min(), pts[:, 1].max(), height)
    if x0 >= x1 or y0 >= y1:
        return None
    ax, ay = pts[:, 0], pts[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    mask = np.zeros((y1 - y0, x1 - x0), dtype=bool)
    centers_x = np.arange(x0, x1) + 0.5
    for row in range(y0, y1):
        yc = row + 0.5
        crossing = (ay <= yc) != (by <= yc)
        if not crossing.any():
            continue
        xa, ya, xb, yb = ax[crossing], ay[crossing], bx[crossing], by[crossing]
        xs = np.sort(xa + (yc - ya) * (xb - xa) / (yb - ya))
        inside = np.searchsorted(xs, centers_x, side="right") % 2 == 1
        mask[row - y0] = inside
    return y0, x0, mask


def _composite(buf: np.ndarray, cov, color) -> None:
    y0, x0, mask = cov
    h, w = mask.shape
    region = buf[y0:y0 + h, x0:x0 + w, :3]
    alpha = float(color[3])
    src = np.asarray(color[:3], dtype=np.float64)
    if alpha >= 1.0:
        region[mask] = src.astype(np.uint8)
    elif alpha > 0.0:
        dst = region[mask].astype(np.float64)
        region[mask] = np.floor(alpha * src + (1.0 - alpha) * dst + 0.5).astype(np.uint8)


def rasterize(marks: Sequence[Mark], spec: RaincloudSpec) -> RasterImage:
    """Paint marks in order, source-over, onto the spec's background."""
    img = RasterImage.filled(spec.width, spec.height, spec.colors.background)
    buf = img.array
    for mark in marks:
        cov = _coverage(mark, spec.width, spec.height)
        if cov is not None:
            _composite(buf, cov, mark.color)
    return img


def render_raincloud(sample, spec: RaincloudSpec, layers: Iterable[Role] = tuple(Role)) -> RasterImage:
    """Scale, lay out each band, and rasterize cloud, then rain, then lightning."""
    by_role = layout_raincloud(sample, spec, layers)
    return rasterize(by_role[Role.CLOUD] + by_role[Role.RAIN] + by_role[Role.LIGHTNING], spec)


# --- encoders ---------------------------------------------------------------

def encode_ppm(image: RasterImage) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image.array[:, :, :3]).tobytes()


def write_ppm(image: RasterImage, path=None) -> bytes:
    """Binary PPM bytes; also written to ``path`` when given."""
    data = encode_ppm(image)
    if path is not None:
        Path(path).write_bytes(data)
    return data


def write_png(image: RasterImage, path=None) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(image.array[:, :, :3]), "RGB").save(buf, format="PNG")
    data = buf.getvalue()
    if path is not None:
        Path(path).write_bytes(data)
    return data


def write_image(image: RasterImage, path, fmt: Optional[str] = None) -> bytes:
    """Write PPM or PNG, choosing by ``fmt`` or the file extension."""
    fmt = (fmt or Path(path).suffix.lstrip(".") or "ppm").lower()
    if fmt == "png":
        return write_png(image, path)
    if fmt == "ppm":
        return write_ppm(image, path)
    raise InvalidParameter(f"unknown image format {fmt!r}; expected ppm or png")
