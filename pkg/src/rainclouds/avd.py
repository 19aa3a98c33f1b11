"""Algebraic robustness checks on rendered rainclouds.

Each detector renders controlled pairs of charts and measures how many
pixels change:

* hallucinator: same data, different layout seed; any visible change is
  manufactured by the representation.
* confuser: materially different data that leaves some component
  unchanged on screen.
* jumbler: an important data change (discretization) with almost no
  visual change.
* misleader: two equally sized data changes with grossly unequal visual
  change (renormalization of bins, scales, or mark sizes).
"""
from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .config import spec_digest, spec_to_dict
from .errors import InvalidParameter, ShapeMismatch
from .layout import (
    CloudKind,
    CloudParams,
    LightningKind,
    LightningParams,
    RainKind,
    Role,
    Shape,
    heatmap_ramp,
)
from .render import Palette, RaincloudSpec, RasterImage, layout_raincloud, render_raincloud
from .rng import MASK64, SplitMix64, check_seed
from .shape import _gaussian_mixture, kde
from .stats import Sample, as_sample, summarize

__all__ = [
    "Family",
    "DistributionSpec",
    "DiffMetric",
    "LineupResult",
    "Experiment",
    "Verdict",
    "RobustnessReport",
    "gen_sample",
    "pixel_diff",
    "make_lineup",
    "hallucinator_test",
    "confuser_test",
    "moment_matched_samples",
    "jumbler_test",
    "jumbler_discretization_test",
    "misleader_renormalization_test",
    "run_suite",
    "reports_to_json",
    "all_designs",
    "SuiteData",
    "kde_l1",
]

HALLUCINATOR_THRESHOLD = 0.001
CONFUSER_THRESHOLD = 0.002
JUMBLER_THRESHOLD = 0.01
MISLEADER_FACTOR = 2.0
MATERIAL_MEAN_SHIFT = 0.1   # in pooled standard deviations
MATERIAL_KDE_L1 = 0.1


class Family(str, Enum):
    GAUSSIAN = "gaussian"
    GAUSSIAN_MIXTURE = "gaussian_mixture"
    LOGNORMAL = "lognormal"
    DISCRETIZED_GAUSSIAN = "discretized_gaussian"


@dataclass(frozen=True)
class DistributionSpec:
    """A seeded data-generating recipe.

    ``params`` by family: gaussian ``(mu, sigma)``; gaussian_mixture
    ``((mu, sigma, weight), ...)``; lognormal ``(log_mu, log_sigma)``;
    discretized_gaussian ``(mu, sigma, grain)``.
    """

    family: Family
    params: tuple
    n: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InvalidParameter(f"n must be a positive integer, got {self.n!r}")
        check_seed(self.seed)
        p = self.params
        if self.family is Family.GAUSSIAN_MIXTURE:
            comps = tuple(tuple(float(v) for v in c) for c in p)
            if not comps or any(len(c) != 3 or not c[1] > 0 or not c[2] > 0 for c in comps):
                raise InvalidParameter("mixture components must be (mu, sigma > 0, weight > 0)")
            if abs(sum(c[2] for c in comps) - 1.0) > 1e-9:
                raise InvalidParameter("mixture weights must sum to 1")
            object.__setattr__(self, "params", comps)
            return
        want = 3 if self.family is Family.DISCRETIZED_GAUSSIAN else 2
        p = tuple(float(v) for v in p)
        if len(p) != want or not p[1] > 0 or (want == 3 and not p[2] > 0):
            raise InvalidParameter(f"{self.family.value} expects {want} parameters with positive scale, got {p}")
        object.__setattr__(self, "params", p)

    @classmethod
    def gaussian(cls, mu=0.0, sigma=1.0, n=100, seed=0):
        return cls(Family.GAUSSIAN, (mu, sigma), n, seed)

    def with_seed(self, seed: int) -> "DistributionSpec":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        params = [list(c) for c in self.params] if self.family is Family.GAUSSIAN_MIXTURE else list(self.params)
        return {"family": self.family.value, "params": params, "n": self.n, "seed": self.seed}

    @classmethod
    def from_dict(cls, doc: dict) -> "DistributionSpec":
        unknown = set(doc) - {"family", "params", "n", "seed"}
        if unknown:
            raise InvalidParameter(f"unknown distribution key(s) {sorted(unknown)}")
        try:
            return cls(doc["family"], tuple(doc["params"]), doc["n"], doc.get("seed", 0))
        except KeyError as exc:
            raise InvalidParameter(f"distribution missing key {exc}") from None


def _round_to(x: float, grain: float) -> float:
    return math.floor(x / grain + 0.5) * grain


def gen_sample(dist: DistributionSpec) -> Sample:
    rng = SplitMix64(dist.seed)
    fam, p = dist.family, dist.params
    out = []
    if fam is Family.GAUSSIAN_MIXTURE:
        cumulative = list(itertools.accumulate(c[2] for c in p))
        for _ in range(dist.n):
            u = rng.uniform()
            k = next((i for i, c in enumerate(cumulative) if u < c), len(p) - 1)
            mu, sigma, _ = p[k]
            out.append(mu + sigma * rng.gauss())
    else:
        for _ in range(dist.n):
            z = p[0] + p[1] * rng.gauss()
            if fam is Family.LOGNORMAL:
                z = math.exp(z)
            elif fam is Family.DISCRETIZED_GAUSSIAN:
                z = _round_to(z, p[2])
            out.append(z)
    return Sample.from_values(out, label=fam.value)


# --- pixel differences -----------------------------------------------------

@dataclass(frozen=True)
class DiffMetric:
    changed_fraction: float
    mean_abs: float
    per_role: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {"changed_fraction": self.changed_fraction, "mean_abs": self.mean_abs}
        if self.per_role is not None:
            d["per_role"] = dict(self.per_role)
        return d


def _pack(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.int32)
    return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]


def _role_keys(palette: Palette) -> dict[Role, np.ndarray]:
    def key(c):
        return (int(c[0]) << 16) | (int(c[1]) << 8) | int(c[2])

    cloud = {key(palette.cloud)} | {key(c) for c in heatmap_ramp(palette.cloud)}
    cloud.discard(key(palette.background))
    return {
        Role.CLOUD: np.array(sorted(cloud)),
        Role.RAIN: np.array([key(palette.rain)]),
        Role.LIGHTNING: np.array([key(palette.lightning)]),
    }


def pixel_diff(a: RasterImage, b: RasterImage, palette: Optional[Palette] = Palette()) -> DiffMetric:
    """Fraction of changed pixels, mean absolute RGB difference, and a per-role split.

    A changed pixel counts toward a role when either image shows that
    role's palette color there. Pass ``palette=None`` to skip the split.
    """
    if (a.width, a.height) != (b.width, b.height):
        raise ShapeMismatch(f"cannot diff {a.width}x{a.height} against {b.width}x{b.height}")
    pa = a.array[:, :, :3]
    pb = b.array[:, :, :3]
    changed = np.any(pa != pb, axis=2)
    total = a.width * a.height
    frac = float(changed.sum()) / total
    mean_abs = float(np.abs(pa.astype(np.int16) - pb.astype(np.int16)).mean())
    per_role = None
    if palette is not None:
        per_role = {}
        ka, kb = _pack(pa)[changed], _pack(pb)[changed]
        for role, keys in _role_keys(palette).items():
            hit = np.isin(ka, keys) | np.isin(kb, keys)
            per_role[role.value] = float(hit.sum()) / total
    return DiffMetric(frac, mean_abs, per_role)


# --- lineups ---------------------------------------------------------------

@dataclass
class LineupResult:
    panels: list
    identical_indices: tuple
    seed: int
    samples: list = field(default_factory=list)

    def manifest(self) -> dict:
        return {
            "seed": self.seed,
            "n_panels": len(self.panels),
            "identical_indices": list(self.identical_indices),
        }


def _bootstrap(sample: Sample, rng: SplitMix64) -> Sample:
    vals = sample.values
    return Sample.from_values((vals[rng.below(len(vals))] for _ in vals), label=sample.label)


def make_lineup(spec: RaincloudSpec, dist: Union[DistributionSpec, Sample], seed: int,
                n_panels: int = 10, shared_scale: bool = False) -> LineupResult:
    """Ten panels, exactly two of which render the same sample.

    ``dist`` is either a generating distribution or an observed sample to
    bootstrap from. Every panel gets its own rain seed, so seeded layouts
    such as jitter differ even between the two identical panels.

    By default each panel scales its own x domain and density peak, so the
    panels compare shapes. ``shared_scale=True`` pins one domain and one
    peak density across all panels so absolute values are comparable.
    """
    check_seed(seed)
    rng = SplitMix64(seed)
    samples = []
    for _ in range(n_panels - 1):
        child = rng.spawn()
        if isinstance(dist, DistributionSpec):
            samples.append(gen_sample(dist.with_seed(child.next_u64())))
        else:
            samples.append(_bootstrap(as_sample(dist), child))
    pairs = list(itertools.combinations(range(n_panels), 2))
    pair = pairs[rng.below(len(pairs))]
    others = samples[1:]
    rng.shuffle(others)
    rain_seeds = [rng.next_u64() for _ in range(n_panels)]

    order = []
    it = iter(others)
    for i in range(n_panels):
        order.append(samples[0] if i in pair else next(it))
    if shared_scale:
        spec = _shared_domain(spec, *samples)
        if spec.cloud.peak_density is None:
            peak = max(float(kde(s, spec.cloud.bandwidth).density.max()) for s in samples)
            spec = replace(spec, cloud=replace(spec.cloud, peak_density=peak))
    panels = [render_raincloud(s, spec.with_rain_seed(rs)) for s, rs in zip(order, rain_seeds)]
    return LineupResult(panels, pair, seed, order)


# --- reports ---------------------------------------------------------------

class Experiment(str, Enum):
    HALLUCINATOR = "hallucinator"
    CONFUSER = "confuser"
    JUMBLER = "jumbler"
    MISLEADER = "misleader"


class Verdict(str, Enum):
    FAILURE_DETECTED = "failure_detected"
    NO_FAILURE_DETECTED = "no_failure_detected"


@dataclass
class RobustnessReport:
    experiment: Experiment
    spec_under_test: RaincloudSpec
    metrics: dict
    verdict: Verdict
    threshold_used: float
    details: dict = field(default_factory=dict)

    @property
    def failure(self) -> bool:
        return self.verdict is Verdict.FAILURE_DETECTED

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment.value,
            "design": self.spec_under_test.design,
            "spec_digest": spec_digest(self.spec_under_test),
            "spec": spec_to_dict(self.spec_under_test),
            "metrics": {k: m.to_dict() for k, m in self.metrics.items()},
            "threshold_used": self.threshold_used,
            "verdict": self.verdict.value,
            "details": self.details,
        }


def _verdict(flag: bool) -> Verdict:
    return Verdict.FAILURE_DETECTED if flag else Verdict.NO_FAILURE_DETECTED


def _shared_domain(spec: RaincloudSpec, *samples: Sample) -> RaincloudSpec:
    if spec.domain is not None:
        return spec
    lo = min(s.min for s in samples)
    hi = max(s.max for s in samples)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return replace(spec, domain=(lo, hi))


def hallucinator_test(spec: RaincloudSpec, sample, k_seeds: int = 5,
                      threshold: float = HALLUCINATOR_THRESHOLD) -> RobustnessReport:
    """Render one sample under ``k_seeds`` rain seeds; report the largest pairwise change."""
    if k_seeds < 2:
        raise InvalidParameter(f"k_seeds must be at least 2, got {k_seeds}")
    sample = as_sample(sample)
    seeds = [(spec.rain.seed + i) & MASK64 for i in range(k_seeds)]
    images = [render_raincloud(sample, spec.with_rain_seed(s)) for s in seeds]
    metrics = {}
    for i, j in itertools.combinations(range(k_seeds), 2):
        metrics[f"seed{i}_vs_seed{j}"] = pixel_diff(images[i], images[j], spec.colors)
    worst = max(m.changed_fraction for m in metrics.values())
    return RobustnessReport(
        Experiment.HALLUCINATOR, spec, metrics, _verdict(worst > threshold), threshold,
        {"max_changed_fraction": worst, "rain_seeds": seeds},
    )


def kde_l1(a, b, grid_size: int = 1024) -> float:
    """L1 distance between the two samples' default KDEs on a shared grid."""
    ea, eb = kde(a), kde(b)
    lo = min(ea.x[0], eb.x[0])
    hi = max(ea.x[-1], eb.x[-1])
    x = np.linspace(lo, hi, grid_size)
    fa = _gaussian_mixture(np.asarray(as_sample(a).values), x, ea.bandwidth)
    fb = _gaussian_mixture(np.asarray(as_sample(b).values), x, eb.bandwidth)
    gap = np.abs(fa - fb)
    return float(np.sum(np.diff(x) * (gap[1:] + gap[:-1]) / 2.0))


def confuser_test(spec: RaincloudSpec, sample_a, sample_b, threshold: float = CONFUSER_THRESHOLD,
                  mean_shift: float = MATERIAL_MEAN_SHIFT, kde_tol: float = MATERIAL_KDE_L1) -> RobustnessReport:
    """Do materially different samples leave some component visually unchanged?

    Both samples share one x scale. The data count as materially different
    when the means differ by more than ``mean_shift`` pooled standard
    deviations or the KDEs differ by more than ``kde_tol`` in L1. A data
    change with no visible pixel change at all is always a confuser.
    """
    a, b = as_sample(sample_a), as_sample(sample_b)
    if a.values == b.values:
        raise InvalidParameter("confuser_test needs two different samples")
    spec = _shared_domain(spec, a, b)
    diff = pixel_diff(render_raincloud(a, spec), render_raincloud(b, spec), spec.colors)

    sa, sb = summarize(a), summarize(b)
    pooled = math.sqrt((sa.sd ** 2 + sb.sd ** 2) / 2.0)
    dmean = abs(sa.mean - sb.mean)
    mean_material = dmean > mean_shift * pooled if pooled > 0 else dmean > 0
    l1 = kde_l1(a, b)
    material = mean_material or l1 > kde_tol

    roles = [Role.CLOUD, Role.RAIN] + ([Role.LIGHTNING] if spec.lightning is not None else [])
    hidden = [r.value for r in roles if diff.per_role[r.value] <= threshold]
    failure = (material and bool(hidden)) or diff.changed_fraction == 0.0
    return RobustnessReport(
        Experiment.CONFUSER, spec, {"a_vs_b": diff}, _verdict(failure), threshold,
        {"delta_mean": dmean, "pooled_sd": pooled, "kde_l1": l1, "materially_different": material,
         "unchanged_components": hidden},
    )


def moment_matched_samples(seed: int = 0, n: int = 200, mu: float = 0.0, sigma: float = 1.0,
                 component_sd: float = 0.5) -> tuple[Sample, Sample]:
    """A unimodal sample and an equal-weight bimodal sample with identical mean and sd.

    The mixture components sit at ``mu -/+ d`` with ``d`` chosen so the
    mixture variance equals ``sigma ** 2``. Each realized sample is then
    affinely rescaled to mean ``mu`` and sd ``sigma`` so that the
    moment-based glyphs coincide exactly.
    """
    if not 0 < component_sd < sigma:
        raise InvalidParameter("component_sd must lie in (0, sigma)")
    d = math.sqrt(sigma ** 2 - component_sd ** 2)
    rng = SplitMix64(seed)
    uni = gen_sample(DistributionSpec.gaussian(mu, sigma, n, rng.next_u64()))
    bi = gen_sample(DistributionSpec(
        Family.GAUSSIAN_MIXTURE, ((mu - d, component_sd, 0.5), (mu + d, component_sd, 0.5)), n, rng.next_u64(),
    ))

    def standardize(s: Sample, label: str) -> Sample:
        st = summarize(s)
        return Sample.from_values(((v - st.mean) / st.sd * sigma + mu for v in s.values), label=label)

    return standardize(uni, "unimodal"), standardize(bi, "bimodal")


def jumbler_test(spec: RaincloudSpec, before, after, threshold: float = JUMBLER_THRESHOLD) -> RobustnessReport:
    """Flag a jumble when a data change moves fewer than ``threshold`` of the pixels."""
    a, b = as_sample(before), as_sample(after)
    spec = _shared_domain(spec, a, b)
    diff = pixel_diff(render_raincloud(a, spec), render_raincloud(b, spec), spec.colors)
    return RobustnessReport(
        Experiment.JUMBLER, spec, {"before_vs_after": diff},
        _verdict(diff.changed_fraction < threshold), threshold,
        {"data_changed": a.values != b.values},
    )


def jumbler_discretization_test(spec: RaincloudSpec, dist: Optional[DistributionSpec] = None, grain: float = 1.0,
                                threshold: float = JUMBLER_THRESHOLD) -> RobustnessReport:
    """Raw draws against the same draws rounded to multiples of ``grain``."""
    dist = dist or DistributionSpec.gaussian(0.0, 20.0, 100, 0)
    raw = gen_sample(dist)
    rounded = Sample.from_values((_round_to(v, grain) for v in raw.values), label="rounded")
    report = jumbler_test(spec, raw, rounded, threshold)
    report.details.update({"distribution": dist.to_dict(), "grain": grain})
    return report


def _rain_radius(sample: Sample, spec: RaincloudSpec) -> Optional[float]:
    marks = layout_raincloud(sample, spec, [Role.RAIN])[Role.RAIN]
    radii = [m.geometry[2] for m in marks if m.shape is Shape.CIRCLE]
    return min(radii) if radii else None


def misleader_renormalization_test(spec: RaincloudSpec, base: Union[DistributionSpec, Sample, None] = None,
                                   k_added: int = 10, factor: float = MISLEADER_FACTOR,
                                   offset_sd: float = 1.5) -> RobustnessReport:
    """Compare adding ``k_added`` points at the mean against adding them at mean + 1.5 sd.

    Both edits are the same size, so a sound design should change about
    as many pixels for each. A failure is flagged when the mode edit
    changes at least ``factor`` times as many pixels as the interior edit.
    """
    if k_added < 0:
        raise InvalidParameter(f"k_added must be non-negative, got {k_added}")
    if base is None:
        base = DistributionSpec.gaussian(0.0, 1.0, 100, 0)
    sample = gen_sample(base) if isinstance(base, DistributionSpec) else as_sample(base)
    st = summarize(sample)
    interior = Sample.from_values(sample.values + (st.mean + offset_sd * st.sd,) * k_added)
    mode = Sample.from_values(sample.values + (st.mean,) * k_added)

    img = render_raincloud(sample, spec)
    d_interior = pixel_diff(img, render_raincloud(interior, spec), spec.colors)
    d_mode = pixel_diff(img, render_raincloud(mode, spec), spec.colors)
    ci, cm = d_interior.changed_fraction, d_mode.changed_fraction
    ratio = cm / ci if ci > 0 else (math.inf if cm > 0 else 0.0)
    radii = {name: _rain_radius(s, spec) for name, s in (("base", sample), ("interior", interior), ("mode", mode))}
    return RobustnessReport(
        Experiment.MISLEADER, spec, {"base_vs_interior": d_interior, "base_vs_mode": d_mode},
        _verdict(cm > 0 and cm >= factor * ci), factor,
        {"ratio": ratio if math.isfinite(ratio) else None, "k_added": k_added, "rain_radius": radii,
         "interior_value": st.mean + offset_sd * st.sd, "mode_value": st.mean},
    )


# --- suites ----------------------------------------------------------------

@dataclass(frozen=True)
class SuiteData:
    hallucinator: Sample
    confuser: tuple
    jumbler: DistributionSpec
    misleader: Sample

    @classmethod
    def from_seed(cls, seed: int) -> "SuiteData":
        rng = SplitMix64(check_seed(seed))
        return cls(
            hallucinator=gen_sample(DistributionSpec.gaussian(0.0, 1.0, 100, rng.next_u64())),
            confuser=moment_matched_samples(rng.next_u64()),
            jumbler=DistributionSpec.gaussian(0.0, 20.0, 100, rng.next_u64()),
            misleader=gen_sample(DistributionSpec.gaussian(0.0, 1.0, 100, rng.next_u64())),
        )


def _suite_for_spec(args) -> list[RobustnessReport]:
    spec, data, k_seeds = args
    return [
        hallucinator_test(spec, data.hallucinator, k_seeds),
        confuser_test(spec, *data.confuser),
        jumbler_discretization_test(spec, data.jumbler),
        misleader_renormalization_test(spec, data.misleader),
    ]


def run_suite(specs: Sequence[RaincloudSpec], seed: int = 0, k_seeds: int = 5,
              jobs: int = 1) -> list[RobustnessReport]:
    """All four detectors over each spec, in input order, on data derived from ``seed``."""
    specs = list(specs)
    if not specs:
        raise InvalidParameter("run_suite needs at least one spec")
    data = SuiteData.from_seed(seed)
    work = [(s, data, k_seeds) for s in specs]
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_suite_for_spec, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        chunks = [_suite_for_spec(w) for w in work]
    return [r for chunk in chunks for r in chunk]


def reports_to_json(reports: Sequence[RobustnessReport], seed: Optional[int] = None) -> str:
    doc = {"seed": seed, "n_reports": len(reports), "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)


def all_designs(base: Optional[RaincloudSpec] = None) -> list[RaincloudSpec]:
    """The 6 x 6 x 6 cloud, rain, and lightning registry, cloud-major order."""
    base = base or RaincloudSpec()
    return [
        replace(base, cloud=CloudParams(c), rain=replace(base.rain, kind=r), lightning=LightningParams(l))
        for c in CloudKind
        for r in RainKind
        for l in LightningKind
    ]
