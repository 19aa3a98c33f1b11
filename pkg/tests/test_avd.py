import json
import math
import statistics

import pytest
from hypothesis import given, strategies as st

from rainclouds.avd import (
    DistributionSpec,
    Experiment,
    Family,
    SuiteData,
    Verdict,
    all_designs,
    confuser_test,
    moment_matched_samples,
    gen_sample,
    hallucinator_test,
    jumbler_discretization_test,
    jumbler_test,
    kde_l1,
    make_lineup,
    misleader_renormalization_test,
    pixel_diff,
    reports_to_json,
    run_suite,
)
from rainclouds.config import load_config
from rainclouds.errors import InvalidParameter, ShapeMismatch
from rainclouds.layout import CloudParams, LightningParams, RainParams
from rainclouds.render import RaincloudSpec, RasterImage, render_raincloud
from rainclouds.stats import summarize


def spec(cloud="density", rain="strip", lightning="boxplot", **kw):
    light = LightningParams(lightning) if lightning else None
    return RaincloudSpec(CloudParams(cloud), RainParams(rain), light, **kw)


# --- generators ------------------------------------------------------------------

def test_gen_sample_deterministic():
    d = DistributionSpec.gaussian(0, 1, 1, 123)
    assert gen_sample(d).values == gen_sample(d).values


def test_discretized_values_integral():
    x = gen_sample(DistributionSpec(Family.DISCRETIZED_GAUSSIAN, (0, 20, 1), 200, 4))
    assert all(v == math.floor(v) for v in x.values)


def test_large_gaussian_moments():
    x = gen_sample(DistributionSpec.gaussian(0, 20, 10_000, 8))
    assert abs(statistics.fmean(x.values)) <= 1.0
    assert 19 <= statistics.stdev(x.values) <= 21


def test_mixture_and_lognormal():
    mix = DistributionSpec(Family.GAUSSIAN_MIXTURE, ((-5, 0.5, 0.5), (5, 0.5, 0.5)), 400, 2)
    x = gen_sample(mix)
    assert sum(v < 0 for v in x.values) in range(150, 251)
    assert min(gen_sample(DistributionSpec(Family.LOGNORMAL, (0, 1), 50, 1)).values) > 0


@pytest.mark.parametrize("bad", [
    dict(family="gaussian", params=(0, -1), n=5),
    dict(family="gaussian", params=(0, 1), n=0),
    dict(family="gaussian_mixture", params=((0, 1, 0.3),), n=5),
    dict(family="nope", params=(0, 1), n=5),
])
def test_distribution_validation(bad):
    with pytest.raises((InvalidParameter, ValueError)):
        DistributionSpec(**bad)


def test_distribution_dict_round_trip():
    d = DistributionSpec(Family.GAUSSIAN_MIXTURE, ((-1, 1, 0.25), (1, 1, 0.75)), 10, 3)
    assert DistributionSpec.from_dict(json.loads(json.dumps(d.to_dict()))) == d


# --- pixel_diff --------------------------------------------------------------------

def test_diff_examples():
    black = RasterImage.filled(10, 10, (0, 0, 0, 1.0))
    white = RasterImage.filled(10, 10, (255, 255, 255, 1.0))
    assert pixel_diff(black, black).changed_fraction == 0
    d = pixel_diff(black, white)
    assert d.changed_fraction == 1.0 and d.mean_abs == 255
    one = RasterImage.filled(10, 10, (255, 255, 255, 1.0))
    one.array[4, 7, 0] = 0
    assert pixel_diff(one, white).changed_fraction == 0.01


def test_diff_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        pixel_diff(RasterImage.filled(2, 2, (0, 0, 0, 1.0)), RasterImage.filled(3, 2, (0, 0, 0, 1.0)))


@given(st.integers(0, 2 ** 32), st.integers(0, 2 ** 32))
def test_diff_symmetric_and_reflexive(s1, s2):
    a = render_raincloud(gen_sample(DistributionSpec.gaussian(0, 1, 30, s1)), spec(rain="jitter"))
    b = render_raincloud(gen_sample(DistributionSpec.gaussian(0, 1, 30, s2)), spec(rain="jitter"))
    assert pixel_diff(a, b) == pixel_diff(b, a)
    assert pixel_diff(a, a).changed_fraction == 0


def test_diff_per_role_split(gaussian100):
    a = render_raincloud(gaussian100, spec(rain="jitter"))
    b = render_raincloud(gaussian100, spec(rain="jitter").with_rain_seed(1))
    d = pixel_diff(a, b)
    assert d.per_role["cloud"] == 0 and d.per_role["lightning"] == 0
    assert d.per_role["rain"] == pytest.approx(d.changed_fraction)


# --- lineups -------------------------------------------------------------------------

def test_lineup_strip_identical_pair():
    res = make_lineup(spec(), DistributionSpec.gaussian(), 7)
    i, j = res.identical_indices
    assert len(res.panels) == 10 and i != j
    assert res.panels[i].pixels == res.panels[j].pixels
    assert pixel_diff(res.panels[i], res.panels[j]).changed_fraction == 0


def test_lineup_jitter_hallucinates():
    res = make_lineup(spec(rain="jitter"), DistributionSpec.gaussian(), 7)
    i, j = res.identical_indices
    assert res.samples[i].values == res.samples[j].values
    assert pixel_diff(res.panels[i], res.panels[j]).changed_fraction > 0


def test_lineup_deterministic_and_seed_random_positions():
    a = make_lineup(spec(), DistributionSpec.gaussian(), 7)
    b = make_lineup(spec(), DistributionSpec.gaussian(), 7)
    assert a.manifest() == b.manifest()
    assert [p.pixels for p in a.panels] == [p.pixels for p in b.panels]
    pairs = {make_lineup(spec(), DistributionSpec.gaussian(0, 1, 20), s).identical_indices for s in range(12)}
    assert len(pairs) > 1


def test_lineup_from_sample_bootstraps(gaussian100):
    res = make_lineup(spec(), gaussian100, 3)
    pool = set(gaussian100.values)
    assert all(set(s.values) <= pool for s in res.samples)


def test_lineup_shared_scale(gaussian100):
    res = make_lineup(spec(), DistributionSpec.gaussian(), 3, shared_scale=True)
    assert len(res.panels) == 10
    i, j = res.identical_indices
    assert res.panels[i].pixels == res.panels[j].pixels


# --- hallucinator --------------------------------------------------------------------------

@pytest.mark.parametrize("rain", ["strip", "wilkinson", "wheat", "beeswarm", "dot"])
def test_hallucinator_deterministic_rains(rain, gaussian100):
    rep = hallucinator_test(spec(rain=rain), gaussian100)
    assert rep.details["max_changed_fraction"] == 0
    assert rep.verdict is Verdict.NO_FAILURE_DETECTED


def test_hallucinator_jitter(gaussian100):
    rep = hallucinator_test(spec(rain="jitter"), gaussian100)
    assert rep.verdict is Verdict.FAILURE_DETECTED and rep.experiment is Experiment.HALLUCINATOR


def test_hallucinator_monotone_in_k(gaussian100):
    worst = [hallucinator_test(spec(rain="jitter"), gaussian100, k).details["max_changed_fraction"]
             for k in (2, 3, 5)]
    assert worst == sorted(worst)


def test_hallucinator_needs_two_seeds(gaussian100):
    with pytest.raises(InvalidParameter):
        hallucinator_test(spec(), gaussian100, 1)


# --- confuser --------------------------------------------------------------------------------

def test_moment_matched_samples_moment_matched():
    uni, bi = moment_matched_samples(0)
    su, sb = summarize(uni), summarize(bi)
    assert len(uni) == len(bi) == 200
    assert su.mean == pytest.approx(sb.mean, abs=1e-12)
    assert su.sd == pytest.approx(sb.sd, abs=1e-12)
    assert kde_l1(uni, bi) > 0.1


def test_confuser_mean_interval_hides_modes():
    uni, bi = moment_matched_samples(0)
    rep = confuser_test(spec("density", "strip", "mean_interval"), uni, bi)
    roles = rep.metrics["a_vs_b"].per_role
    assert roles["lightning"] <= 0.002
    assert roles["cloud"] >= 0.02
    assert rep.verdict is Verdict.FAILURE_DETECTED
    assert rep.details["unchanged_components"] == ["lightning"]


def test_confuser_sub_pixel_change(gaussian100):
    vals = list(gaussian100.values)
    span = vals[-1] - vals[0]
    vals[50] += 0.1 * span / 380  # a tenth of a pixel
    rep = confuser_test(spec("histogram", "strip", "boxplot"), gaussian100, vals)
    assert rep.metrics["a_vs_b"].changed_fraction == 0
    assert rep.verdict is Verdict.FAILURE_DETECTED


def test_confuser_identical_rejected(gaussian100):
    with pytest.raises(InvalidParameter):
        confuser_test(spec(), gaussian100, list(gaussian100.values))


# --- jumbler ---------------------------------------------------------------------------------------

def test_jumbler_control_arm(gaussian100):
    rep = jumbler_test(spec("histogram", "wilkinson"), gaussian100, gaussian100)
    assert rep.metrics["before_vs_after"].changed_fraction == 0


def test_jumbler_strip_reports_small_nonzero_diff():
    rep = jumbler_discretization_test(spec("density", "strip", "boxplot"))
    frac = rep.metrics["before_vs_after"].changed_fraction
    assert 0 < frac < 0.2
    assert rep.details["grain"] == 1.0


# --- misleader -------------------------------------------------------------------------------------

def test_misleader_control():
    rep = misleader_renormalization_test(spec("histogram", "wilkinson", "mean_marker"), k_added=0)
    assert all(m.changed_fraction == 0 for m in rep.metrics.values())
    assert rep.verdict is Verdict.NO_FAILURE_DETECTED


def test_misleader_canonical_preset():
    rep = misleader_renormalization_test(spec("histogram", "wilkinson", "mean_marker"), SuiteData.from_seed(0).misleader)
    assert rep.verdict is Verdict.FAILURE_DETECTED
    assert rep.details["ratio"] >= 2


def test_misleader_fixed_domain_strip_density(gaussian100):
    rep = misleader_renormalization_test(spec("density", "strip", "mean_marker", domain=(-4, 4)), gaussian100)
    assert rep.verdict is Verdict.NO_FAILURE_DETECTED
    assert 0.5 <= rep.details["ratio"] < 2


# --- suites and reports ------------------------------------------------------------------------------

def test_all_designs():
    designs = all_designs()
    assert len(designs) == 216 == len({d.design for d in designs})


def test_run_suite_teasers():
    specs = [load_config(f"teaser-{c}") for c in "abc"]
    reports = run_suite(specs, seed=0)
    assert len(reports) == 12
    assert [r.experiment.value for r in reports[:4]] == ["hallucinator", "confuser", "jumbler", "misleader"]
    assert reports[0].verdict is Verdict.FAILURE_DETECTED  # density-jitter-boxplot


def test_run_suite_better_example_passes_hallucinator():
    [hal, *_] = run_suite([spec("density", "strip", "qinterval")], seed=0)
    assert hal.verdict is Verdict.NO_FAILURE_DETECTED


def test_run_suite_parallel_matches_serial():
    specs = all_designs()[:4]
    serial = reports_to_json(run_suite(specs, seed=1), 1)
    parallel = reports_to_json(run_suite(specs, seed=1, jobs=2), 1)
    assert serial == parallel


def test_report_json_schema():
    reports = run_suite([spec()], seed=0, k_seeds=2)
    doc = json.loads(reports_to_json(reports, 0))
    assert doc["seed"] == 0 and doc["n_reports"] == 4
    for r in doc["reports"]:
        assert set(r) == {"experiment", "design", "spec_digest", "spec", "metrics", "threshold_used", "verdict",
                          "details"}
        assert r["verdict"] in ("failure_detected", "no_failure_detected")
        for m in r["metrics"].values():
            assert 0 <= m["changed_fraction"] <= 1 and 0 <= m["mean_abs"] <= 255


def test_run_suite_requires_specs():
    with pytest.raises(InvalidParameter):
        run_suite([])
