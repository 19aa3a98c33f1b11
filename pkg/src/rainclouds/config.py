"""JSON design configs and CSV ingestion.

A design config is a JSON object whose keys map one-to-one onto
:class:`~rainclouds.render.RaincloudSpec`. Unknown keys are rejected so a
misspelled parameter never silently falls back to a default::

    {
      "cloud": {"kind": "density", "n_dots": 20, "bin_rule": "sturges",
                "bandwidth": null, "peak_density": null},
      "rain": {"kind": "strip", "dot_radius": 5.0, "opacity": 1.0,
               "wheat_bins": null, "seed": 0},
      "lightning": {"kind": "boxplot", "sd_multiple": 1.0},
      "width": 400, "height": 160, "margin": 10.0,
      "band_fractions": [0.4, 0.35, 0.25],
      "domain": null,
      "colors": {"cloud": [128, 128, 128, 1.0], "rain": [70, 130, 180, 1.0],
                 "lightning": [218, 165, 32, 1.0],
                 "background": [255, 255, 255, 1.0]}
    }

Every key is optional. ``cloud``, ``rain`` and ``lightning`` also accept a
bare kind string, and ``lightning`` accepts ``null`` for no lightning.

:func:`load_config` also accepts the names in :data:`PRESETS`.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import fields
from importlib import resources
from pathlib import Path
from typing import Any, Union

from .errors import EmptySample, RaincloudError
from .layout import CloudParams, LightningParams, RainParams
from .render import Palette, RaincloudSpec
from .stats import Sample

__all__ = [
    "ConfigError",
    "DataError",
    "spec_from_dict",
    "spec_to_dict",
    "load_config",
    "dump_config",
    "spec_digest",
    "read_csv_column",
    "PRESETS",
    "BUNDLED_DATA",
    "bundled_data_path",
]


class ConfigError(RaincloudError):
    pass


class DataError(RaincloudError):
    pass


# The three canonical example designs on the precipitation data.
PRESETS = {
    "teaser-a": {"cloud": "density", "rain": "jitter", "lightning": "boxplot"},
    "teaser-b": {"cloud": "split_boxplot", "rain": "strip", "lightning": "mean_marker"},
    "teaser-c": {"cloud": "histogram", "rain": "dot", "lightning": "mean_interval"},
}

BUNDLED_DATA = {
    "seattle": "seattle_precip_days.csv",
    "synthetic": "synthetic_gaussian.csv",
}


def bundled_data_path(name: str) -> Path:
    """Filesystem path of a bundled CSV, by short name or file name."""
    fname = BUNDLED_DATA.get(name, name)
    if fname not in BUNDLED_DATA.values():
        raise DataError(f"no bundled dataset {name!r} (have {', '.join(BUNDLED_DATA)})")
    return Path(str(resources.files("rainclouds").joinpath("data").joinpath(fname)))


_TOP_KEYS = {"cloud", "rain", "lightning", "width", "height", "margin", "band_fractions", "domain", "colors"}
_COLOR_KEYS = {"cloud", "rain", "lightning", "background"}


def _params(cls, value, where: str):
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object or a kind string, got {type(value).__name__}")
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(repr, unknown))}")
    try:
        return cls(**value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def spec_from_dict(doc: dict) -> RaincloudSpec:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s) {', '.join(map(repr, unknown))}")
    kwargs: dict[str, Any] = {}
    if "cloud" in doc:
        kwargs["cloud"] = _params(CloudParams, doc["cloud"], "cloud")
    if "rain" in doc:
        kwargs["rain"] = _params(RainParams, doc["rain"], "rain")
    if "lightning" in doc:
        light = doc["lightning"]
        kwargs["lightning"] = None if light in (None, "none") else _params(LightningParams, light, "lightning")
    if "colors" in doc:
        colors = doc["colors"]
        if not isinstance(colors, dict):
            raise ConfigError("colors: expected an object")
        bad = sorted(set(colors) - _COLOR_KEYS)
        if bad:
            raise ConfigError(f"colors: unknown key(s) {', '.join(map(repr, bad))}")
        try:
            kwargs["colors"] = Palette(**{k: tuple(v) for k, v in colors.items()})
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"colors: {exc}") from None
    for key in ("width", "height"):
        if key in doc:
            v = doc[key]
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{key}: expected an integer, got {v!r}")
            kwargs[key] = v
    if "margin" in doc:
        kwargs["margin"] = float(doc["margin"])
    if "band_fractions" in doc:
        kwargs["band_fractions"] = tuple(doc["band_fractions"])
    if "domain" in doc and doc["domain"] is not None:
        kwargs["domain"] = tuple(doc["domain"])
    try:
        return RaincloudSpec(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _plain(obj) -> dict:
    out = {}
    for f in fields(obj):
        v = getattr(obj, f.name)
        out[f.name] = v.value if hasattr(v, "value") else v
    return out


def spec_to_dict(spec: RaincloudSpec) -> dict:
    return {
        "cloud": _plain(spec.cloud),
        "rain": _plain(spec.rain),
        "lightning": _plain(spec.lightning) if spec.lightning is not None else None,
        "width": spec.width,
        "height": spec.height,
        "margin": spec.margin,
        "band_fractions": list(spec.band_fractions),
        "domain": list(spec.domain) if spec.domain is not None else None,
        "colors": {k: list(getattr(spec.colors, k)) for k in ("cloud", "rain", "lightning", "background")},
    }


def load_config(path_or_text: Union[str, Path]) -> RaincloudSpec:
    """Parse a config from a file path, a preset name, or JSON text starting with ``{``."""
    text = str(path_or_text)
    if text in PRESETS:
        return spec_from_dict(PRESETS[text])
    if not text.lstrip().startswith("{"):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path_or_text}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in config: {exc}") from None
    return spec_from_dict(doc)


def dump_config(spec: RaincloudSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True)


def spec_digest(spec: RaincloudSpec) -> str:
    canonical = json.dumps(spec_to_dict(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def read_csv_column(path, column: Union[str, int, None] = 0, delimiter: str = ",", label=None) -> Sample:
    """Read one numeric column from a CSV file with a header row.

    ``column`` is a header name, a 0-based index, or ``None`` for the last
    column. Any empty or non-numeric cell is an error naming its 1-based
    file row.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    numbered = [(i, r) for i, r in enumerate(rows, start=1) if any(c.strip() for c in r)]
    if not numbered:
        raise EmptySample(f"{path}: empty sample (file has no header or data rows)")
    header, body = numbered[0][1], numbered[1:]
    if column is None:
        idx = len(header) - 1
    elif isinstance(column, str) and not column.isdigit():
        if column not in header:
            raise DataError(f"{path}: no column named {column!r} (have {', '.join(header)})")
        idx = header.index(column)
    else:
        idx = int(column)
        if not 0 <= idx < len(header):
            raise DataError(f"{path}: column index {idx} out of range for {len(header)} column(s)")
    values = []
    for lineno, row in body:
        cell = row[idx].strip() if idx < len(row) else ""
        try:
            v = float(cell)
        except ValueError:
            raise DataError(f"{path}: row {lineno}: non-numeric value {cell!r} in column {header[idx]!r}") from None
        if not math.isfinite(v):
            raise DataError(f"{path}: row {lineno}: non-finite value {cell!r}")
        values.append(v)
    if not body:
        raise EmptySample(f"{path}: empty sample (no data rows)")
    return Sample.from_values(values, label=label or header[idx])
