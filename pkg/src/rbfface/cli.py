"""Command-line interface: ``rbfface {train,eval,sweep,detect,synth}``.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__
from ._backend import NAME as BACKEND
from .centers import INIT_METHODS
from .dataset import PATCH_SIZE, PREPROCESSING, DatasetManifest, load_dataset, synth_dataset, write_dataset
from .detector import DetectorConfig, annotate, detect, write_detections_csv
from .errors import DimensionError, RbfFaceError
from .evaluator import SweepGrid, best_by_centers, emit_csv, evaluate, run_sweep
from .images import load_image
from .modelfile import load_model, save_model
from .plots import emit_plots
from .trainer import STRATEGIES, TrainConfig, fit

log = logging.getLogger("rbfface")


def positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _float(text, lo=None, lo_open=False):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise argparse.ArgumentTypeError(f"must be {'>' if lo_open else '>='} {lo}, got {v}")
    return v


def positive_float(text):
    return _float(text, 0.0, lo_open=True)


def nonneg_float(text):
    return _float(text, 0.0)


def finite_float(text):
    return _float(text)


def parse_grid(text, kind=float):
    """Parse ``a,b,c`` or an inclusive ``start:stop:step`` range into a list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [Decimal(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(Decimal(1))
            if len(parts) != 3:
                raise argparse.ArgumentTypeError(f"range must be start:stop[:step], got {text!r}")
            start, stop, step = parts
            if step <= 0:
                raise argparse.ArgumentTypeError(f"range step must be positive, got {step}")
            if stop < start:
                raise argparse.ArgumentTypeError(f"empty range {text!r}")
            n = int((stop - start) / step) + 1
            vals = [start + i * step for i in range(n)]
        else:
            vals = [Decimal(p) for p in text.split(",") if p.strip()]
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    if kind is int:
        if any(v != v.to_integral_value() for v in vals):
            raise argparse.ArgumentTypeError(f"center counts must be integers: {text!r}")
        out = [int(v) for v in vals]
    else:
        out = [float(v) for v in vals]
    if any(v <= 0 for v in out):
        raise argparse.ArgumentTypeError(f"grid values must be positive: {text!r}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise argparse.ArgumentTypeError(f"grid values must be strictly increasing: {text!r}")
    return out


def center_grid(text):
    return parse_grid(text, int)


def spread_grid(text):
    return parse_grid(text, float)


def _patch_side(dim):
    side = math.isqrt(dim)
    if side * side != dim:
        raise DimensionError(f"model input dimension {dim} is not a square patch")
    return side


def _add_data_args(p, flag="--data", help_text="dataset root holding faces/ and nonfaces/"):
    p.add_argument(flag, required=True, type=Path, help=help_text)


def cmd_train(args):
    manifest = DatasetManifest.from_root(args.data, args.patch_size)
    data = load_dataset(manifest)
    cfg = TrainConfig(
        num_centers=args.centers,
        spread=args.spread,
        center_strategy=args.strategy,
        seed=args.seed,
        regularization=args.regularization,
        max_iterations=args.max_iterations,
        kmeans_init=args.kmeans_init,
    )
    res = fit(data, cfg)
    meta = {
        "preprocessing": PREPROCESSING,
        "patch_size": args.patch_size,
        "center_strategy": args.strategy,
        "kmeans_init": args.kmeans_init,
        "seed": args.seed,
        "regularization": args.regularization,
        "solver_rank": res.solver_rank,
        "num_train": len(data),
    }
    save_model(res.model, args.out, meta)
    print(
        f"trained N={len(data)} S1={res.model.num_centers} spread={args.spread:g} "
        f"train_seconds={res.train_seconds:.3f} solver_rank={res.solver_rank}"
    )
    return 0


def cmd_eval(args):
    model, meta = load_model(args.model)
    side = _patch_side(model.input_dim)
    data = load_dataset(DatasetManifest.from_root(args.data, side))
    if data.dim != model.input_dim:
        raise DimensionError(f"data dimension {data.dim} != model input dimension {model.input_dim}")
    rep = evaluate(
        model, data, threshold=args.threshold,
        center_strategy=str(meta.get("center_strategy", "")),
        seed=int(meta.get("seed", 0)),
        solver_rank=int(meta.get("solver_rank", -1)),
    )
    print(f"{rep.face_rate:.6f} {rep.nonface_rate:.6f} {rep.far:.6f} {rep.frr:.6f}")
    if args.csv:
        emit_csv([rep], args.csv, append=True)
    return 0


def cmd_sweep(args):
    train = load_dataset(DatasetManifest.from_root(args.data, args.patch_size))
    test = load_dataset(DatasetManifest.from_root(args.test or args.data, args.patch_size))
    grid = SweepGrid(tuple(args.centers), tuple(args.spreads), args.seed)
    template = TrainConfig(
        num_centers=1, spread=1.0, center_strategy=args.strategy,
        regularization=args.regularization, max_iterations=args.max_iterations,
        kmeans_init=args.kmeans_init,
    )
    jobs = args.jobs or os.cpu_count() or 1
    reports = run_sweep(train, test, grid, template, jobs=jobs, record_timings=args.timings)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(reports, out / "sweep.csv")
    side = {
        "preprocessing": PREPROCESSING,
        "center_strategy": args.strategy,
        "kmeans_init": args.kmeans_init,
        "regularization": args.regularization,
        "base_seed": args.seed,
        "failed_cells": [
            {"centers": r.num_centers, "spread": r.spread, "reason": r.error} for r in reports if not r.ok
        ],
    }
    (out / "sweep_meta.json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    try:
        plots = emit_plots(reports, out)
    except RbfFaceError as exc:
        print(f"note: no plots written: {exc}", file=sys.stderr)
        plots = []
    ok = [r for r in reports if r.ok]
    for c, r in sorted(best_by_centers(reports).items()):
        print(
            f"centers={c} best_spread={r.spread:g} face_rate={r.face_rate:.6f} "
            f"nonface_rate={r.nonface_rate:.6f} far={r.far:.6f} frr={r.frr:.6f}"
        )
    print(f"{len(reports)} cells ({len(reports) - len(ok)} failed), {len(plots)} plots -> {out}")
    return 0 if ok else 1


def cmd_detect(args):
    model, _ = load_model(args.model)
    side = _patch_side(model.input_dim)
    image = load_image(args.image)
    cfg = DetectorConfig(
        patch_size=side,
        stride=args.stride,
        score_threshold=args.threshold,
        scale_factor=args.scale_factor,
        min_level_size=args.min_level_size,
        nms_overlap=args.nms,
    )
    boxes = detect(image, model, cfg)
    if args.out:
        annotate(image, boxes, args.out)
    if args.csv:
        write_detections_csv(boxes, args.csv)
    print(f"{len(boxes)} detections")
    return 0


def cmd_synth(args):
    dim = args.patch_size ** 2
    data = synth_dataset(args.seed, args.per_class, dim, args.separation)
    m = write_dataset(data, args.out, args.patch_size)
    print(f"wrote {m.expected_counts[0]} faces, {m.expected_counts[1]} non-faces to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rbfface",
        description="Fixed-spread Gaussian RBF network face detector.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("train", help="train a model and write it as JSON")
    _add_data_args(p)
    p.add_argument("--centers", type=positive_int, required=True, help="number of RBF centers")
    p.add_argument("--spread", type=positive_float, required=True, help="Gaussian spread (beta)")
    p.add_argument("--strategy", choices=STRATEGIES, default="kmeans")
    p.add_argument("--seed", type=nonneg_int, default=0)
    p.add_argument("--regularization", type=nonneg_float, default=0.0, help="ridge term (default 0)")
    p.add_argument("--max-iterations", type=positive_int, default=100, help="k-means iteration cap")
    p.add_argument("--kmeans-init", choices=INIT_METHODS, default="random", help="k-means seeding")
    p.add_argument("--patch-size", type=positive_int, default=PATCH_SIZE)
    p.add_argument("--out", type=Path, required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a labeled dataset")
    p.add_argument("--model", type=Path, required=True)
    _add_data_args(p)
    p.add_argument("--threshold", type=finite_float, default=0.0, help="score threshold for 'face'")
    p.add_argument("--csv", type=Path, help="append a result row to this CSV file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="train/evaluate over a centers x spread grid")
    _add_data_args(p, help_text="training dataset root")
    p.add_argument("--test", type=Path, help="test dataset root (default: the training set)")
    p.add_argument("--centers", type=center_grid, required=True, help="e.g. 2,25,120,200 or 2:200:2")
    p.add_argument("--spreads", type=spread_grid, default=spread_grid("1:40:1"), help="e.g. 1:40:1 or 3,4,5")
    p.add_argument("--strategy", choices=STRATEGIES, default="kmeans")
    p.add_argument("--seed", type=nonneg_int, default=0, help="base seed")
    p.add_argument("--regularization", type=nonneg_float, default=0.0)
    p.add_argument("--max-iterations", type=positive_int, default=100)
    p.add_argument("--kmeans-init", choices=INIT_METHODS, default="random")
    p.add_argument("--patch-size", type=positive_int, default=PATCH_SIZE)
    p.add_argument("--jobs", type=positive_int, default=None, help="worker threads (default: CPU count)")
    p.add_argument(
        "--timings", action="store_true",
        help="record wall-clock seconds in the CSV (output is then not byte-reproducible)",
    )
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("detect", help="find faces in a large image")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--image", type=Path, required=True, help="PGM or PNG image")
    p.add_argument("--out", type=Path, help="annotated PGM to write")
    p.add_argument("--csv", type=Path, help="detections CSV to write")
    p.add_argument("--stride", type=positive_int, default=1)
    p.add_argument("--threshold", type=finite_float, default=0.0)
    p.add_argument("--scale-factor", type=_scale_factor, default=1.2)
    p.add_argument("--min-level-size", type=positive_int, default=None)
    p.add_argument("--nms", type=_overlap, default=0.3, help="IoU suppression threshold; 1.0 disables")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("synth", help="write a synthetic two-blob patch dataset")
    p.add_argument("--per-class", type=positive_int, required=True)
    p.add_argument("--seed", type=nonneg_int, default=0)
    p.add_argument("--separation", type=nonneg_float, default=20.0)
    p.add_argument("--patch-size", type=positive_int, default=PATCH_SIZE)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def _scale_factor(text):
    return _float(text, 1.0, lo_open=True)


def _overlap(text):
    v = _float(text, 0.0)
    if v > 1:
        raise argparse.ArgumentTypeError(f"must be <= 1, got {v}")
    return v


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (RbfFaceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
