"""Command-line interface: augment, preview, sweep, stats, phantom, info.

Every command is deterministic given --seed. When --seed is omitted a
random one is drawn and printed, so any run can be reproduced after the
fact. Exit codes: 0 full success, 1 partial or runtime failure, 2 usage
or configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import SCHEMA_VERSION, TRANSFORMS, AugmentationConfig
from .errors import (
    AugmentError,
    BadLevelError,
    BadNError,
    BadSliceIndexError,
    BadTransformIdError,
    ConfigError,
    SpecOutOfBoundsError,
)
from .nifti import read_nifti, write_nifti
from .phantom import PhantomSpec, build_phantom
from .pipeline import Pipeline, Sample
from .preview import build_montage, render_montage
from .rng import SeededRng, derive_stream
from .sampling import sample_params, schedule
from .volume import normalize_intensity, orientation_code, reorient_to_ras

_USAGE_ERRORS = (
    ConfigError,
    BadTransformIdError,
    BadSliceIndexError,
    BadNError,
    BadLevelError,
    SpecOutOfBoundsError,
)

# nominal grid for parameter histograms in `stats` (bias centers need one)
_STATS_SHAPE = (64, 64, 64)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (AugmentError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mriaug",
        description="Deterministic 3D MRI augmentation on NIfTI volumes.",
    )
    parser.add_argument("--version", action="version", version=__version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="base seed; drawn and printed when omitted")
    common.add_argument("--config", default=None,
                        help="augmentation config JSON")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (overrides MRIAUG_THREADS)")
    common.add_argument("--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("augment", parents=[common],
                       help="augment NIfTI volumes, write plan JSON per input")
    p.add_argument("inputs", nargs="+", help="input .nii/.nii.gz files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--labels", nargs="+", default=None,
                   help="label maps, one per input, transformed alongside")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("preview", parents=[common],
                       help="montage PNG: original + each transform alone")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.add_argument("--index", type=int, default=None,
                   help="slice index (default: middle)")
    p.add_argument("--exaggerate", action="store_true",
                   help="use magnitude level 5 instead of level 3")
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("sweep", parents=[common],
                       help="one transform at magnitude levels 1..5")
    p.add_argument("input")
    p.add_argument("--transform", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", parents=[common],
                       help="empirical scheduling frequencies and parameter spreads")
    p.add_argument("--draws", type=int, default=10000)
    p.add_argument("--out", default=None, help="write report here instead of stdout")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("phantom", parents=[common],
                       help="rasterize a synthetic phantom spec")
    p.add_argument("spec", help="phantom spec JSON")
    p.add_argument("--out", required=True, help="output image path (.nii/.nii.gz)")
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("info", parents=[common],
                       help="version and interface description as JSON")
    p.set_defaults(func=cmd_info)
    return parser


# --- helpers ----------------------------------------------------------------


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    seed = int.from_bytes(os.urandom(8), "little") >> 1
    print(f"seed: {seed}")
    return seed


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, int(args.threads))
    env = os.environ.get("MRIAUG_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"ignoring MRIAUG_THREADS={env!r}", file=sys.stderr)
    return 1


def _load_config(path) -> AugmentationConfig:
    if path is None:
        return AugmentationConfig()
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return AugmentationConfig.from_json(text)


def _stem(path: str) -> str:
    name = os.path.basename(path)
    if name.endswith(".nii.gz"):
        return name[:-7]
    return os.path.splitext(name)[0]


def _load_sample(image_path, labels_path=None) -> Sample:
    """Read, reorient to RAS if needed, and normalize to [0, 1]."""
    v, _ = read_nifti(image_path)
    labels = read_nifti(labels_path, as_labels=True)[0] if labels_path else None
    if orientation_code(v.affine) != "RAS":
        if labels is None:
            v = reorient_to_ras(v)
        else:
            v, labels = reorient_to_ras(v, labels)
    v = normalize_intensity(v)
    return Sample(image=v, labels=labels, id=_stem(image_path))


# --- commands ----------------------------------------------------------------


def cmd_augment(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(args)
    threads = _resolve_threads(args)
    labels = args.labels
    if labels and len(labels) != len(args.inputs):
        print(
            f"error: got {len(labels)} label maps for {len(args.inputs)} inputs",
            file=sys.stderr,
        )
        return 2
    pipe = Pipeline(config)
    os.makedirs(args.out, exist_ok=True)

    def process(i: int):
        path = args.inputs[i]
        sample = _load_sample(path, labels[i] if labels else None)
        out, plan = pipe.apply(sample, derive_stream(seed, i))
        stem = _stem(path)
        img_path = os.path.join(args.out, f"{stem}_aug.nii.gz")
        write_nifti(out.image, img_path)
        Path(os.path.join(args.out, f"{stem}_aug.plan.json")).write_text(
            plan.to_json() + "\n"
        )
        if out.labels is not None:
            write_nifti(
                out.labels, os.path.join(args.out, f"{stem}_aug_labels.nii.gz")
            )
        return img_path, plan

    indices = range(len(args.inputs))
    results = {}
    if threads == 1:
        for i in indices:
            results[i] = _guard(process, i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, r in zip(indices, pool.map(lambda i: _guard(process, i), indices)):
                results[i] = r

    failures = 0
    for i in indices:
        r = results[i]
        if isinstance(r, Exception):
            failures += 1
            print(f"failed: {args.inputs[i]}: {r}", file=sys.stderr)
        elif args.verbose:
            img_path, plan = r
            applied = ", ".join(plan.transform_ids()) or "none"
            print(f"{args.inputs[i]} -> {img_path} ({applied})")
    return 1 if failures else 0


def _guard(fn, *a):
    try:
        return fn(*a)
    except Exception as e:  # noqa: BLE001 - per-file isolation
        return e


def cmd_preview(args) -> int:
    config = _load_config(args.config)
    if args.exaggerate:
        config = config.with_level(5)
    seed = _resolve_seed(args)
    sample = _load_sample(args.input)
    panels = build_montage(
        sample, config, seed, slice_axis=args.axis, slice_index=args.index
    )
    render_montage(panels, args.out)
    if args.verbose:
        for p in panels:
            print(f"{p.name}: {p.caption}")
    print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    if args.transform not in TRANSFORMS:
        raise BadTransformIdError(
            f"unknown transform {args.transform!r}; choose from {', '.join(TRANSFORMS)}"
        )
    config = _load_config(args.config)
    seed = _resolve_seed(args)
    item_seed = derive_stream(seed, 0)
    sample = _load_sample(args.input)
    os.makedirs(args.out, exist_ok=True)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "transform": args.transform,
        "seed": seed,
        "input": args.input,
        "levels": [],
    }
    stem = _stem(args.input)
    for level in (1, 2, 3, 4, 5):
        pipe = Pipeline(config.solo(args.transform).with_level(level))
        out, plan = pipe.apply(sample, item_seed)
        name = f"{stem}_{args.transform}_L{level}.nii.gz"
        path = os.path.join(args.out, name)
        write_nifti(out.image, path)
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        step_params = plan.steps[0].params if plan.steps else {}
        manifest["levels"].append(
            {
                "level": level,
                "params": step_params,
                "path": name,
                "sha256": digest,
                "plan": plan.to_dict(),
            }
        )
        if args.verbose:
            print(f"level {level}: {name} params={step_params}")
    manifest_path = os.path.join(args.out, f"{stem}_{args.transform}_sweep.json")
    Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {manifest_path}")
    return 0


def cmd_stats(args) -> int:
    if args.draws < 1000:
        raise BadNError(f"need at least 1000 draws, got {args.draws}")
    config = _load_config(args.config)
    seed = _resolve_seed(args)
    report = sampler_report(config, args.draws, seed)
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def sampler_report(config: AugmentationConfig, draws: int, seed: int) -> dict:
    """Empirical inclusion frequencies and parameter spreads over n plans."""
    rng = SeededRng(int(seed))
    counts = {t: 0 for t in TRANSFORMS}
    values = {t: {} for t in TRANSFORMS}

    def record(t, key, x):
        values[t].setdefault(key, []).append(float(x))

    for _ in range(draws):
        plan = sample_params(
            config, schedule(config, rng), rng, _STATS_SHAPE, seed=0
        )
        for step in plan.steps:
            t = step.transform
            counts[t] += 1
            for key, val in step.params.items():
                if key in ("noise_seed", "field_seed"):
                    continue
                if isinstance(val, (list, tuple)):
                    for k, x in enumerate(val):
                        record(t, f"{key}[{k}]", x)
                else:
                    record(t, key, val)

    frequency = {t: counts[t] / draws for t in TRANSFORMS}
    flags = []
    for t in TRANSFORMS:
        p = config.probability(t)
        sigma = (p * (1.0 - p) / draws) ** 0.5
        if abs(frequency[t] - p) > 4.0 * sigma:
            flags.append(t)

    parameters = {}
    for t in TRANSFORMS:
        if not values[t]:
            continue
        parameters[t] = {}
        for key, xs in values[t].items():
            arr = np.asarray(xs, dtype=np.float64)
            hist, edges = np.histogram(arr, bins=20)
            parameters[t][key] = {
                "min": float(arr.min()),
                "max": float(arr.max()),
                "mean": float(arr.mean()),
                "std": float(arr.std()),
                "histogram": hist.tolist(),
                "bin_edges": edges.tolist(),
            }
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": int(seed),
        "draws": int(draws),
        "p_aug": config.p_aug,
        "magnitude_level": config.magnitude_level,
        "frequency": frequency,
        "expected": {t: config.probability(t) for t in TRANSFORMS},
        "flags": flags,
        "parameters": parameters,
    }


def cmd_phantom(args) -> int:
    try:
        text = Path(args.spec).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read phantom spec {args.spec}: {e}") from e
    spec = PhantomSpec.from_json(text)
    image, labels = build_phantom(spec)
    write_nifti(image, args.out)
    if args.out.endswith(".nii.gz"):
        labels_path = args.out[:-7] + "_labels.nii.gz"
    else:
        root, ext = os.path.splitext(args.out)
        labels_path = f"{root}_labels{ext or '.nii'}"
    write_nifti(labels, labels_path)
    print(f"wrote {args.out}")
    print(f"wrote {labels_path}")
    return 0


def cmd_info(args) -> int:
    print(
        json.dumps(
            {
                "name": "mriaug",
                "version": __version__,
                "schema_version": SCHEMA_VERSION,
                "transforms": list(TRANSFORMS),
                "magnitude_levels": [1, 2, 3, 4, 5],
                "default_config": AugmentationConfig().to_dict(),
            },
            indent=2,
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
