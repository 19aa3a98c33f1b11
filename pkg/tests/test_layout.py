import math

import pytest
from hypothesis import given, strategies as st

from _oracles import band_violations, circles, overlap_violations, wheat_violations
from rainclouds.errors import BandTooThin, InvalidParameter
from rainclouds.layout import (
    Band,
    CloudKind,
    CloudParams,
    LightningKind,
    LightningParams,
    Mark,
    RainKind,
    RainParams,
    Role,
    ScaleX,
    Shape,
    autosize_dot_radius,
    heatmap_ramp,
    layout_beeswarm,
    layout_cloud,
    layout_jitter,
    layout_lightning,
    layout_rain,
    layout_strip,
    layout_wheat,
    layout_wilkinson,
    lightning_intervals,
)
from rainclouds.layout import beeswarm_offsets, wilkinson_columns
from rainclouds.shape import histogram
from rainclouds.stats import Sample, WhiskerRule, summarize, whisker_bounds

BAND = Band(66.0, 115.0, Role.RAIN)
TALL = Band(0.0, 100.0, Role.RAIN)
PIXELS = ScaleX(0.0, 380.0, 10.0, 390.0)  # one data unit per pixel

values = st.lists(st.floats(0, 380), min_size=1, max_size=120)


def test_autosize_examples():
    assert autosize_dot_radius(1, 100, 5) == 5
    assert autosize_dot_radius(20, 100, 5) == 2.5
    assert autosize_dot_radius(10, 100, 5) == 5


def test_autosize_rejects():
    with pytest.raises(InvalidParameter):
        autosize_dot_radius(0, 100, 5)


def test_scale_endpoints():
    s = ScaleX(0.0, 10.0, 10.0, 390.0)
    assert s(0) == 10 and s(10) == 390
    with pytest.raises(InvalidParameter):
        ScaleX(1.0, 1.0, 0.0, 1.0)


def test_mark_validation():
    with pytest.raises(InvalidParameter):
        Mark(Shape.CIRCLE, (0, 0, -1), (0, 0, 0, 1.0))
    with pytest.raises(InvalidParameter):
        Mark(Shape.RECT, (0, math.nan, 1, 1), (0, 0, 0, 1.0))
    with pytest.raises(InvalidParameter):
        Mark(Shape.CIRCLE, (0, 0, 1), (0, 0, 0, 1.5))


# --- strip and jitter -------------------------------------------------------------

def test_strip_single_and_duplicates():
    [m] = layout_strip([7.0], PIXELS, BAND, RainParams("strip"))
    assert m.shape is Shape.VLINE and m.geometry[0] == PIXELS(7.0)
    marks = layout_strip([3.0] * 4, PIXELS, BAND, RainParams("strip"))
    assert len(marks) == 4 and len({m.geometry for m in marks}) == 1


def test_jitter_seeded():
    xs = [float(v) for v in range(100)]
    a = layout_jitter(xs, PIXELS, BAND, RainParams("jitter", seed=1))
    b = layout_jitter(xs, PIXELS, BAND, RainParams("jitter", seed=1))
    c = layout_jitter(xs, PIXELS, BAND, RainParams("jitter", seed=2))
    assert a == b
    assert [m.geometry[1] for m in a] != [m.geometry[1] for m in c]
    r = 5.0
    assert all(BAND.y_top + r <= m.geometry[1] <= BAND.y_bottom - r for m in a)
    assert [m.geometry[0] for m in a] == [PIXELS(v) for v in xs]


def test_jitter_band_too_thin():
    with pytest.raises(BandTooThin):
        layout_jitter([1.0], PIXELS, Band(0, 8, Role.RAIN), RainParams("jitter", dot_radius=5))


# --- wilkinson -------------------------------------------------------------------------

def test_wilkinson_spread_values_stay_on_baseline():
    marks = layout_wilkinson([0.0, 20.0, 50.0], PIXELS, TALL, RainParams("wilkinson"))
    assert [m.geometry for m in marks] == [(PIXELS(v), 95.0, 5.0) for v in (0.0, 20.0, 50.0)]


def test_wilkinson_identical_values_stack():
    marks = layout_wilkinson([4.0] * 3, PIXELS, TALL, RainParams("wilkinson"))
    assert [m.geometry for m in marks] == [(PIXELS(4.0), 95.0 - 10.0 * i, 5.0) for i in range(3)]


def test_wilkinson_one_pixel_apart_merge_at_midpoint():
    assert wilkinson_columns([100.0, 101.0], 5.0) == [(100.5, 2)]
    marks = layout_wilkinson([90.0, 91.0], PIXELS, TALL, RainParams("wilkinson"))
    assert {m.geometry[0] for m in marks} == {100.5}


def test_wilkinson_running_mean_membership():
    # third point is within 2r of the running mean (5) but not of the first point
    assert wilkinson_columns([0.0, 10.0, 14.0], 5.0) == [(8.0, 3)]
    assert wilkinson_columns([0.0, 10.0, 15.5], 5.0) == [(5.0, 2), (15.5, 1)]


@given(values)
def test_wilkinson_overlap_free(xs):
    marks = layout_wilkinson(xs, PIXELS, BAND, RainParams("wilkinson"))
    assert overlap_violations(marks) == 0
    assert band_violations(marks, BAND) == 0
    assert len(marks) == len(xs)


# --- beeswarm ---------------------------------------------------------------------------

def test_beeswarm_spread_values_on_midline():
    marks = layout_beeswarm([0.0, 20.0, 50.0], PIXELS, TALL, RainParams("beeswarm"))
    assert {m.geometry[1] for m in marks} == {TALL.mid}


def test_beeswarm_three_identical():
    assert beeswarm_offsets([50.0] * 3, 5.0) == [0.0, 10.0, -10.0]
    marks = layout_beeswarm([2.0] * 3, PIXELS, TALL, RainParams("beeswarm"))
    assert [m.geometry[1] for m in marks] == [50.0, 40.0, 60.0]


@given(values)
def test_beeswarm_overlap_free_exact_x(xs):
    marks = layout_beeswarm(xs, PIXELS, BAND, RainParams("beeswarm"))
    assert overlap_violations(marks) == 0
    assert sorted(m.geometry[0] for m in marks) == sorted(PIXELS(v) for v in xs)


# --- wheat --------------------------------------------------------------------------------

def test_wheat_offsets():
    # bins of width 10: three members in the first bin, one in the last
    xs = [0.0, 1.0, 2.0, 40.0]
    marks = layout_wheat(xs, PIXELS, TALL, RainParams("wheat", wheat_bins=4))
    ys = sorted(m.geometry[1] for m in marks if m.geometry[0] < PIXELS(10))
    assert ys == [75.0, 85.0, 95.0]


def test_wheat_distinct_bins_on_baseline():
    marks = layout_wheat([0.0, 10.5, 20.5, 40.0], PIXELS, TALL, RainParams("wheat", wheat_bins=4))
    assert {m.geometry[1] for m in marks} == {95.0}


def test_wheat_autosizes_in_gaussian_regime(gaussian100):
    marks = layout_wheat(gaussian100, ScaleX(gaussian100.min, gaussian100.max, 10, 390), BAND, RainParams("wheat"))
    fullest = max(histogram(gaussian100).counts)
    r = marks[0].geometry[2]
    assert fullest * 2 * 5 > BAND.height
    assert r < 5 and r == BAND.height / (2 * fullest)


@given(values, st.integers(1, 12))
def test_wheat_positions(xs, k):
    sample = Sample.from_values(xs)
    marks = layout_wheat(sample, PIXELS, BAND, RainParams("wheat", wheat_bins=k))
    assert wheat_violations(marks, sample, BAND, PIXELS, k) == 0
    assert band_violations(marks, BAND) == 0


@given(st.lists(st.floats(0, 380), min_size=2, max_size=60))
def test_strip_and_wheat_preserve_x_order(xs):
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    for kind in ("strip", "wheat"):
        marks = layout_rain(xs, PIXELS, BAND, RainParams(kind))
        got = sorted(m.geometry[0] for m in marks)
        assert got == [PIXELS(xs[i]) for i in order]


@pytest.mark.parametrize("kind", list(RainKind))
def test_rain_deterministic(kind, gaussian100):
    scale = ScaleX(gaussian100.min, gaussian100.max, 10, 390)
    a = layout_rain(gaussian100, scale, BAND, RainParams(kind, seed=3))
    b = layout_rain(gaussian100, scale, BAND, RainParams(kind, seed=3))
    assert a == b


# --- clouds -----------------------------------------------------------------------------------

CLOUD_BAND = Band(10.0, 66.0, Role.CLOUD)


def test_density_symmetric_about_mean():
    xs = [-3.0, -1.0, 0.0, 1.0, 3.0]
    scale = ScaleX(-3.0, 3.0, 10.0, 390.0)
    [poly] = layout_cloud(xs, scale, CLOUD_BAND, CloudParams("density"))
    pts = poly.geometry[1:-1]
    assert min(p[1] for p in pts) == pytest.approx(CLOUD_BAND.y_top)
    for (xa, ya), (xb, yb) in zip(pts, reversed(pts)):
        assert xa - scale(0) == pytest.approx(scale(0) - xb, abs=1e-9)
        assert ya == pytest.approx(yb, abs=1e-9)


def test_heatmap_one_darkest_cell(gaussian100):
    scale = ScaleX(gaussian100.min, gaussian100.max, 10, 390)
    marks = layout_cloud(gaussian100, scale, CLOUD_BAND, CloudParams("heatmap"))
    darkest = heatmap_ramp()[-1]
    assert sum(m.color == darkest for m in marks) == 1


def test_heatmap_ramp_distinct():
    ramp = heatmap_ramp()
    assert len(set(ramp)) == len(ramp) == 65


def test_quantile_dotplot_twenty_circles(gaussian100):
    scale = ScaleX(gaussian100.min, gaussian100.max, 10, 390)
    marks = layout_cloud(gaussian100, scale, CLOUD_BAND, CloudParams("quantile_dotplot", n_dots=20))
    assert len(circles(marks)) == 20
    assert overlap_violations(marks) == 0


@pytest.mark.parametrize("kind", list(CloudKind))
def test_cloud_within_band(kind, gaussian100):
    scale = ScaleX(gaussian100.min, gaussian100.max, 10, 390)
    for m in layout_cloud(gaussian100, scale, CLOUD_BAND, CloudParams(kind)):
        lo, hi = m.y_extent()
        assert CLOUD_BAND.y_top - m.stroke_width <= lo and hi <= CLOUD_BAND.y_bottom + m.stroke_width


# --- lightning ----------------------------------------------------------------------------------

LIGHT_BAND = Band(115.0, 150.0, Role.LIGHTNING)


def _lightning(xs, kind, scale):
    return layout_lightning(summarize(xs), lightning_intervals(xs), scale, LIGHT_BAND, LightningParams(kind))


def test_constant_boxplot_collapses():
    scale = ScaleX(1.5, 2.5, 10, 390)
    xs = {x for m in _lightning([2.0] * 5, "boxplot", scale) for x in m.xs()}
    assert xs == {scale(2.0)}


def test_boxplot_and_midgap_share_whiskers_and_median(gaussian100):
    scale = ScaleX(gaussian100.min, gaussian100.max, 10, 390)
    box = {x for m in _lightning(gaussian100, "boxplot", scale) for x in m.xs()}
    mid = {x for m in _lightning(gaussian100, "midgap", scale) for x in m.xs()}
    w = whisker_bounds(gaussian100)
    s = summarize(gaussian100)
    for x in (scale(w.lo), scale(w.hi), scale(s.median)):
        assert x in box and x in mid


def test_moment_plot_whisker_reaches_outlier():
    xs = [float(v) for v in range(1, 101)] + [1e6]
    scale = ScaleX(1.0, 1e6, 10, 390)
    moment = max(x for m in _lightning(xs, "moment_plot", scale) for x in m.xs())
    box = max(x for m in _lightning(xs, "boxplot", scale) for x in m.xs())
    assert moment == pytest.approx(scale(whisker_bounds(xs, WhiskerRule.FULL_RANGE).hi))
    assert box == pytest.approx(scale(whisker_bounds(xs).hi)) and box < scale(1e6)


def test_moment_plot_skew_triangle_direction():
    scale = ScaleX(0, 20, 10, 390)
    right = [1.0] * 10 + [2.0, 3.0, 19.0]
    left = [19.0] * 10 + [18.0, 17.0, 1.0]
    tri_r = [m for m in _lightning(right, "moment_plot", scale) if m.shape is Shape.POLYGON][0]
    tri_l = [m for m in _lightning(left, "moment_plot", scale) if m.shape is Shape.POLYGON][0]
    tip_r = max(p[0] for p in tri_r.geometry)
    tip_l = min(p[0] for p in tri_l.geometry)
    assert tip_r > scale(summarize(right).mean)
    assert tip_l < scale(summarize(left).mean)


@pytest.mark.parametrize("kind", list(LightningKind))
def test_lightning_within_band(kind, gaussian100):
    scale = ScaleX(gaussian100.min, gaussian100.max, 10, 390)
    for m in _lightning(gaussian100, kind, scale):
        lo, hi = m.y_extent()
        assert LIGHT_BAND.y_top - m.stroke_width <= lo and hi <= LIGHT_BAND.y_bottom + m.stroke_width
