"""Command line entry point for reproducible reduction experiments.

Subcommands: synth, reduce, evaluate, compare. Flags can also come from a
flat JSON config file via --config; explicit flags override file values.
All outputs land under --out-dir with fixed names (cube.f32, cube.json,
gt.csv, model.json, features.csv, trace.csv, metrics.json, compare.csv).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import serialize
from .cube import (
    BandMask,
    HyperCube,
    apply_band_mask,
    load_cube,
    load_ground_truth,
    save_cube,
    save_ground_truth,
    synth_cube,
)
from .errors import BandReduceError
from .evaluate import SplitSpec, evaluate_features, read_features_csv, write_features_csv
from .nn import TrainConfig
from .pca import pca_fit
from .sdae import SdaeModel, fit_sdae

CUBE_FILE = "cube.f32"
HEADER_FILE = "cube.json"
GT_FILE = "gt.csv"
MODEL_FILE = "model.json"
FEATURES_FILE = "features.csv"
TRACE_FILE = "trace.csv"
METRICS_FILE = "metrics.json"
COMPARE_FILE = "compare.csv"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandreduce",
        description="Spectral band reduction with stacked denoising autoencoders",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat JSON config file; flags override its values")
        p.add_argument("--out-dir", help="directory for output artifacts")
        p.add_argument("--seed", type=int, help="master random seed")

    p = sub.add_parser("synth", help="generate a synthetic labeled cube")
    common(p)
    p.add_argument("--classes", type=int, help="number of classes")
    p.add_argument("--per-class", type=int, help="pixels per class")
    p.add_argument("--bands", type=int, help="spectral band count")
    p.add_argument("--latent", type=int, help="intrinsic latent dimension")
    p.add_argument("--noise-sd", type=float, help="per-pixel noise standard deviation")
    p.add_argument("--nonlinear", action="store_true", default=None,
                   help="squash latent centers before mixing")

    def experiment(p: argparse.ArgumentParser) -> None:
        common(p)
        p.add_argument("--cube", help="raw float32 cube file")
        p.add_argument("--header", help="JSON sidecar header")
        p.add_argument("--gt", help="ground truth CSV")
        p.add_argument("--band-mask", help="1-based bands to drop, e.g. 108-112,154-167,224")
        p.add_argument("--method", choices=["udae", "pca"], help="reduction method")
        p.add_argument("--k", type=int, help="reduced band count")
        p.add_argument("--segments", type=int, help="spatial segment count")
        p.add_argument("--noise", type=float, help="corruption fraction")
        p.add_argument("--lr", type=float, help="learning rate")
        p.add_argument("--epochs", type=int, help="training epochs per stage")
        p.add_argument("--batch", type=int, help="minibatch size")
        p.add_argument("--loss", choices=["squared", "cross_entropy"], help="reconstruction loss")
        p.add_argument("--mode", choices=["batch", "stochastic"], help="gradient mode")
        p.add_argument("--widths", help="comma separated hidden widths, last must equal k")

    p = sub.add_parser("reduce", help="fit a reducer and export features")
    experiment(p)

    p = sub.add_parser("evaluate", help="score an exported feature CSV")
    common(p)
    p.add_argument("--features", help="features.csv produced by reduce")
    p.add_argument("--knn-k", type=int, help="kNN neighbor count")
    p.add_argument("--knn-sweep", action="store_true", default=None,
                   help="also sweep k from 1 to 20")
    p.add_argument("--train-fraction", type=float, help="per-class training fraction")

    p = sub.add_parser("compare", help="run seg/non-seg and pca side by side")
    experiment(p)
    p.add_argument("--knn-k", type=int, help="kNN neighbor count")
    p.add_argument("--knn-sweep", action="store_true", default=None,
                   help="also sweep k from 1 to 20")
    p.add_argument("--train-fraction", type=float, help="per-class training fraction")
    return parser


DEFAULTS = {
    "seed": 0,
    "classes": 3,
    "per_class": 100,
    "bands": 16,
    "latent": 4,
    "noise_sd": 0.05,
    "nonlinear": False,
    "method": "udae",
    "k": 4,
    "segments": 1,
    "noise": 0.1,
    "lr": 0.01,
    "epochs": 225,
    "batch": 32,
    "loss": "squared",
    "mode": "batch",
    "widths": None,
    "knn_k": 5,
    "knn_sweep": False,
    "train_fraction": 0.30,
    "band_mask": None,
}


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge defaults, config file values, and explicit flags, in that order."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        file_values = json.loads(Path(args.config).read_text())
        if not isinstance(file_values, dict):
            raise BandReduceError(f"{args.config} must hold a JSON object")
        for key, value in file_values.items():
            merged[key.replace("-", "_")] = value
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        merged[key] = value
    return merged


def _train_config(opts: dict) -> TrainConfig:
    widths = opts.get("widths")
    if isinstance(widths, str):
        widths = tuple(int(w) for w in widths.split(","))
    elif isinstance(widths, list):
        widths = tuple(int(w) for w in widths)
    return TrainConfig(
        noise_fraction=opts["noise"],
        learning_rate=opts["lr"],
        epochs=opts["epochs"],
        batch_size=opts["batch"],
        loss=opts["loss"],
        mode=opts["mode"],
        seed=opts["seed"],
        widths=widths,
    )


def _out_dir(opts: dict) -> Path:
    out = Path(opts.get("out_dir") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_inputs(opts: dict) -> tuple[HyperCube, np.ndarray]:
    for key in ("cube", "header", "gt"):
        if not opts.get(key):
            raise BandReduceError(f"--{key} is required")
    cube = load_cube(opts["cube"], opts["header"])
    gt = load_ground_truth(opts["gt"], expected_pixels=cube.n_pixels)
    if opts.get("band_mask"):
        cube = apply_band_mask(cube, BandMask.from_ranges(opts["band_mask"]))
    return cube, gt.labels


def _write_trace_csv(path: Path, model: SdaeModel | None) -> None:
    lines = ["segment,stage,epoch,error"]
    if model is not None:
        for seg in range(model.plan.count):
            for layer_index, trace in enumerate(model.pretrain_traces[seg], start=1):
                for epoch, err in enumerate(trace, start=1):
                    lines.append(f"{seg},layer{layer_index},{epoch},{format(err, '.17g')}")
            for epoch, err in enumerate(model.finetune_traces[seg], start=1):
                lines.append(f"{seg},fine_tune,{epoch},{format(err, '.17g')}")
    path.write_text("\n".join(lines) + "\n")


def cmd_synth(opts: dict) -> int:
    cube, gt = synth_cube(
        classes=opts["classes"],
        pixels_per_class=[opts["per_class"]] * opts["classes"],
        bands=opts["bands"],
        intrinsic_dim=opts["latent"],
        noise_sd=opts["noise_sd"],
        seed=opts["seed"],
        nonlinear=opts["nonlinear"],
    )
    out = _out_dir(opts)
    save_cube(cube, out / CUBE_FILE, out / HEADER_FILE)
    save_ground_truth(gt, out / GT_FILE)
    print(f"wrote {out / CUBE_FILE} ({cube.n_pixels} pixels x {cube.n_bands} bands)")
    return 0


def _fit_and_transform(cube: HyperCube, method: str, opts: dict):
    config = _train_config(opts)
    if method == "udae":
        model = fit_sdae(cube, opts["k"], opts["segments"], config)
        return model, model.transform(cube)
    model = pca_fit(cube.data, opts["k"])
    return model, model.transform(cube.data)


def cmd_reduce(opts: dict) -> int:
    cube, labels = _load_inputs(opts)
    out = _out_dir(opts)
    model, features = _fit_and_transform(cube, opts["method"], opts)
    serialize.save_model(model, out / MODEL_FILE)
    write_features_csv(out / FEATURES_FILE, features, labels)
    _write_trace_csv(out / TRACE_FILE, model if isinstance(model, SdaeModel) else None)
    print(f"wrote {out / MODEL_FILE}, {out / FEATURES_FILE}, {out / TRACE_FILE}")
    return 0


def cmd_evaluate(opts: dict) -> int:
    if not opts.get("features"):
        raise BandReduceError("--features is required")
    features, labels = read_features_csv(opts["features"])
    spec = SplitSpec(train_fraction=opts["train_fraction"], seed=opts["seed"])
    report = evaluate_features(features, labels, spec, opts["knn_k"])
    if opts["knn_sweep"]:
        sweep = []
        for k in range(1, 21):
            swept = evaluate_features(features, labels, spec, k)
            sweep.append({"knn_k": k, "kappa": swept["kappa"],
                          "overall_accuracy": swept["overall_accuracy"]})
        report["sweep"] = sweep
    out = _out_dir(opts)
    (out / METRICS_FILE).write_text(serialize.dumps(report) + "\n")
    print(f"kappa={report['kappa']:.4f} oa={report['overall_accuracy']:.4f} -> {out / METRICS_FILE}")
    return 0


def cmd_compare(opts: dict) -> int:
    cube, labels = _load_inputs(opts)
    out = _out_dir(opts)
    spec = SplitSpec(train_fraction=opts["train_fraction"], seed=opts["seed"])
    neighbor_counts = list(range(1, 21)) if opts["knn_sweep"] else [opts["knn_k"]]
    runs = [
        ("seg-udae", "udae", opts["segments"]),
        ("non-seg-udae", "udae", 1),
        ("pca", "pca", 1),
    ]
    lines = ["method,knn_k,kappa,overall_accuracy,fit_ms"]
    for name, method, segments in runs:
        run_opts = dict(opts, segments=segments)
        started = time.perf_counter()
        _, features = _fit_and_transform(cube, method, run_opts)
        fit_ms = (time.perf_counter() - started) * 1000.0
        for k in neighbor_counts:
            report = evaluate_features(features, labels, spec, k)
            lines.append(
                f"{name},{k},{format(report['kappa'], '.17g')},"
                f"{format(report['overall_accuracy'], '.17g')},{fit_ms:.3f}"
            )
    (out / COMPARE_FILE).write_text("\n".join(lines) + "\n")
    print(f"wrote {out / COMPARE_FILE}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve_options(args)
        if args.command == "synth":
            return cmd_synth(opts)
        if args.command == "reduce":
            return cmd_reduce(opts)
        if args.command == "evaluate":
            return cmd_evaluate(opts)
        return cmd_compare(opts)
    except BandReduceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
