"""Command-line entry point.

Subcommands::

    rainclouds plot        --data CSV [--column C] [--config CFG] [--seed N] --out FILE [--format ppm|png]
    rainclouds lineup      (--data CSV | --dist JSON) [--config CFG] [--seed N] --out DIR
    rainclouds robustness  (--config CFG | --all-216) [--seed N] [--out FILE] [--jobs N]
    rainclouds gallery     --data CSV [--column C] [--seed N] --out DIR

``--data`` accepts a CSV path or a bundled dataset name (``seattle``,
``synthetic``). ``--config`` accepts a JSON file, inline JSON, or a preset
name (``teaser-a``, ``teaser-b``, ``teaser-c``).

Exit status is 0 iff every requested output was written. Detected
robustness failures are results, not errors, and still exit 0.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .avd import DistributionSpec, all_designs, make_lineup, reports_to_json, run_suite
from .config import BUNDLED_DATA, bundled_data_path, load_config, read_csv_column, spec_digest, spec_to_dict
from .errors import RaincloudError
from .layout import CloudKind, CloudParams, LightningKind, LightningParams, RainKind, Role
from .render import RaincloudSpec, render_raincloud, write_image
from .rng import check_seed

PROG = "rainclouds"


class CliError(Exception):
    pass


def _data_path(arg: str) -> Path:
    p = Path(arg)
    if not p.exists() and arg in BUNDLED_DATA:
        return bundled_data_path(arg)
    return p


def _load_sample(args):
    column = args.column
    if column is not None and column.lstrip("-").isdigit():
        column = int(column)
    return read_csv_column(_data_path(args.data), column, args.delimiter)


def _load_spec(args) -> RaincloudSpec:
    return load_config(args.config) if args.config else RaincloudSpec()


def _seed(value: Optional[int]) -> Optional[int]:
    return None if value is None else check_seed(value)


def _image_name(stem: str, fmt: str) -> str:
    return f"{stem}.{fmt}"


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_plot(args) -> int:
    sample = _load_sample(args)
    spec = _load_spec(args)
    seed = _seed(args.seed)
    if seed is not None:
        spec = spec.with_rain_seed(seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_image(render_raincloud(sample, spec), out, args.format)
    print(f"wrote {out} ({spec.design}, n={len(sample.values)})")
    return 0


def _load_dist(text: str) -> DistributionSpec:
    if not text.lstrip().startswith("{"):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise CliError(f"cannot read distribution {text}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in --dist: {exc}") from None
    if not isinstance(doc, dict):
        raise CliError("--dist must be a JSON object")
    return DistributionSpec.from_dict(doc)


def cmd_lineup(args) -> int:
    if args.data and args.dist:
        raise CliError("give either --data or --dist, not both")
    if args.data:
        source = _load_sample(args)
        source_doc = {"data": str(args.data), "n": len(source.values)}
    else:
        source = _load_dist(args.dist) if args.dist else DistributionSpec.gaussian()
        source_doc = {"dist": source.to_dict()}
    spec = _load_spec(args)
    seed = check_seed(args.seed)
    result = make_lineup(spec, source, seed, shared_scale=args.shared_scale)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.format or "ppm"
    files = []
    blobs = []
    for i, panel in enumerate(result.panels):
        name = _image_name(f"panel_{i:02d}", fmt)
        blobs.append(write_image(panel, out / name, fmt))
        files.append(name)
    i, j = result.identical_indices
    manifest = result.manifest()
    manifest.update(
        design=spec.design,
        spec_digest=spec_digest(spec),
        shared_scale=args.shared_scale,
        files=files,
        identical_pair_byte_equal=blobs[i] == blobs[j],
        **source_doc,
    )
    _write_json(out / "manifest.json", manifest)
    print(f"wrote {len(files)} panels and manifest.json to {out}; identical pair {i}, {j}")
    return 0


def cmd_robustness(args) -> int:
    if args.all_216 == bool(args.config):
        raise CliError("give exactly one of --config or --all-216")
    specs = all_designs() if args.all_216 else [load_config(args.config)]
    seed = check_seed(args.seed)
    reports = run_suite(specs, seed=seed, k_seeds=args.k_seeds, jobs=args.jobs)
    text = reports_to_json(reports, seed) + "\n"
    if args.out and args.out != "-":
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        failures = sum(r.failure for r in reports)
        print(f"wrote {out}: {len(specs)} spec(s), {len(reports)} reports, {failures} failure(s) detected")
    else:
        sys.stdout.write(text)
    return 0


def gallery_specs(seed: int = 0) -> list[tuple[Role, str, RaincloudSpec]]:
    """The 18 single-component designs: six clouds, six rains, six lightnings."""
    base = RaincloudSpec()
    out = [(Role.CLOUD, k.value, replace(base, cloud=CloudParams(k))) for k in CloudKind]
    out += [(Role.RAIN, k.value, replace(base, rain=replace(base.rain, kind=k, seed=seed))) for k in RainKind]
    out += [(Role.LIGHTNING, k.value, replace(base, lightning=LightningParams(k))) for k in LightningKind]
    return out


def cmd_gallery(args) -> int:
    sample = _load_sample(args)
    seed = check_seed(args.seed if args.seed is not None else 0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.format or "ppm"
    index = []
    for role, kind, spec in gallery_specs(seed):
        name = _image_name(f"{role.value}_{kind}", fmt)
        blob = write_image(render_raincloud(sample, spec, layers=(role,)), out / name, fmt)
        index.append({
            "file": name,
            "role": role.value,
            "kind": kind,
            "sha256": hashlib.sha256(blob).hexdigest(),
            "spec": spec_to_dict(spec),
        })
    _write_json(out / "index.json", {"n_images": len(index), "n": len(sample.values), "images": index})
    print(f"wrote {len(index)} images and index.json to {out}")
    return 0


def _add_data_args(p, required=True):
    p.add_argument("--data", required=required, help="CSV file with a header row, or a bundled name: "
                   + ", ".join(BUNDLED_DATA))
    p.add_argument("--column", default=None, help="column name or 0-based index (default: last column)")
    p.add_argument("--delimiter", default=",", help="CSV delimiter (default: comma)")


def _add_format(p):
    p.add_argument("--format", choices=("ppm", "png"), default=None,
                   help="image format (default: from the file extension, else ppm)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Render raincloud plots and test their robustness.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plot", help="render one raincloud")
    _add_data_args(p)
    p.add_argument("--config", help="JSON file, inline JSON, or preset name")
    p.add_argument("--seed", type=int, default=None, help="rain layout seed (overrides the config)")
    p.add_argument("--out", required=True, help="output image path")
    _add_format(p)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("lineup", help="write ten panels, two of them showing the same sample")
    _add_data_args(p, required=False)
    p.add_argument("--dist", help='distribution JSON, e.g. {"family": "gaussian", "params": [0, 1], "n": 100}')
    p.add_argument("--config", help="JSON file, inline JSON, or preset name")
    p.add_argument("--seed", type=int, default=0, help="lineup seed (default: 0)")
    p.add_argument("--shared-scale", action="store_true",
                   help="pin one x domain and density peak across panels")
    p.add_argument("--out", required=True, help="output directory")
    _add_format(p)
    p.set_defaults(func=cmd_lineup)

    p = sub.add_parser("robustness", help="run the four detectors and write a JSON report")
    p.add_argument("--config", help="JSON file, inline JSON, or preset name")
    p.add_argument("--all-216", action="store_true", help="run every registry design")
    p.add_argument("--seed", type=int, default=0, help="suite data seed (default: 0)")
    p.add_argument("--k-seeds", type=int, default=5, help="layout seeds per hallucinator test (default: 5)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("gallery", help="render each component kind on its own")
    _add_data_args(p)
    p.add_argument("--seed", type=int, default=None, help="rain layout seed (default: 0)")
    p.add_argument("--out", required=True, help="output directory")
    _add_format(p)
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RaincloudError, CliError) as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"{PROG} {args.command}: error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
