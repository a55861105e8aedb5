"""Command-line entry points wiring synthesis, training and evaluation.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import dataio, metrics
from .model.checkpoint import load_checkpoint, save_checkpoint
from .model.config import PRESETS, preset_config
from .model.fusion import naive_scale
from .model.network import build_model, extend_from_stub
from .scene.dataset import DepthDataset, generate_dataset
from .training import (TrainConfig, ValidationHistory, predict_frames,
                       read_train_config, select_best_checkpoint, train)

OUTPUT_ROOT_ENV = "RADARDEPTH_OUTPUT_ROOT"
VARIANTS = ("ours", "metric-baseline", "naive")

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


def _resolve_output(path) -> Path:
    path = Path(path)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def _parse_image_size(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"image size must look like 640x480, got {text!r}")
    if w <= 0 or h <= 0:
        raise ConfigError(f"image size must be positive, got {text!r}")
    return w, h


def _existing_dir(path, what) -> Path:
    path = Path(path)
    if not path.is_dir():
        raise ConfigError(f"{what} directory does not exist: {path}")
    return path


def cmd_synth(args) -> int:
    out_dir = _resolve_output(args.output)
    image_size = _parse_image_size(args.image_size)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc}")
    manifest = generate_dataset(out_dir, n_scenes=args.scenes,
                                samples_per_scene=args.samples_per_scene,
                                image_size=image_size, seed=args.seed)
    logger.info("wrote %d samples to %s", len(manifest["samples"]), out_dir)
    return 0


def _load_train_config(args) -> TrainConfig:
    if args.config:
        config_path = Path(args.config)
        if not config_path.is_file():
            raise ConfigError(f"config file does not exist: {config_path}")
        config = read_train_config(config_path)
    else:
        config = TrainConfig()
    # flags win over the config file
    for key in ("epochs", "steps_per_epoch", "batch_size", "base_lr", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            config = TrainConfig(**{**config.__dict__, key: value})
    return config


def cmd_train(args) -> int:
    train_dir = _existing_dir(args.dataset, "training dataset")
    val_dir = _existing_dir(args.val_dataset, "validation dataset")
    if args.preset not in PRESETS:
        raise ConfigError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
    if args.variant not in ("ours", "metric-baseline"):
        raise ConfigError(f"variant must be ours or metric-baseline, got {args.variant!r}")
    config = _load_train_config(args)
    out_dir = _resolve_output(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    train_ds = DepthDataset(train_dir)
    val_ds = DepthDataset(val_dir)
    width, height = train_ds.image_size
    model_config = preset_config(args.preset, image_size=(height, width),
                                 input_channels=3, output_channels=1)
    stub = build_model(model_config, seed=config.seed)
    model = extend_from_stub(stub, init_seed=config.seed)

    use_radar = args.variant == "ours"
    history = train(model, (train_ds, val_ds), config, out_dir, use_radar=use_radar)
    best = select_best_checkpoint(history)
    best_record = {
        "variant": args.variant,
        "preset": args.preset,
        "best_checkpoint": best,
        "history": [
            {"epoch": r.epoch, "val_absrel": r.val_absrel, "checkpoint": r.checkpoint}
            for r in history.records
        ],
    }
    (out_dir / "best_checkpoint.json").write_text(
        json.dumps(best_record, indent=2, sort_keys=True) + "\n")
    logger.info("best checkpoint: %s", best)
    return 0


def evaluate_variant(checkpoint_path, dataset_dir, variant, out_dir,
                     subsample=10, dump_predictions=False):
    """Evaluate one model variant over a dataset; writes report + plot series."""
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
    dataset = DepthDataset(dataset_dir)
    model, _ = load_checkpoint(checkpoint_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    use_radar = variant == "ours"
    acc = metrics.MetricAccumulator()
    frames_for_series = []
    for frame, d0, w_map, fused in predict_frames(model, dataset, use_radar=use_radar):
        if variant == "naive":
            pred = naive_scale(d0, frame["observations"])
        else:
            pred = fused
        gt = frame["depth"]
        mask = metrics.valid_mask(gt)
        acc.add_frame(frame["id"], pred, gt, mask)
        frames_for_series.append((pred, gt, mask))
        if dump_predictions:
            stem = out_dir / frame["id"]
            dataio.save_depth_raster(f"{stem}_d0.npy", d0)
            if w_map is not None:
                np.save(f"{stem}_w.npy", w_map.astype(np.float32))
            dataio.save_depth_raster(f"{stem}_fused.npy", pred)

    report = acc.report()
    dataset_name = Path(dataset_dir).name
    report_path = out_dir / f"report_{variant}.json"
    metrics.write_report(report_path, variant, dataset_name, report)
    series = metrics.error_vs_depth(frames_for_series, subsample=subsample)
    series_path = out_dir / f"error_vs_depth_{variant}.csv"
    metrics.write_error_vs_depth_csv(series_path, series)
    table = metrics.format_report_table(
        [(variant, dataset_name, report.absrel, report.delta1, report.rmse)])
    (out_dir / f"report_{variant}.txt").write_text(table + "\n")
    return report


def cmd_eval(args) -> int:
    dataset_dir = _existing_dir(args.dataset, "evaluation dataset")
    checkpoint = Path(args.checkpoint)
    if not checkpoint.is_file():
        raise ConfigError(f"checkpoint does not exist: {checkpoint}")
    out_dir = _resolve_output(args.output)
    report = evaluate_variant(checkpoint, dataset_dir, args.variant, out_dir,
                              subsample=args.subsample,
                              dump_predictions=args.dump_predictions)
    print(metrics.format_report_table(
        [(args.variant, Path(dataset_dir).name, report.absrel, report.delta1, report.rmse)]))
    return 0


def cmd_compare(args) -> int:
    rows = []
    for path in args.reports:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"report does not exist: {path}")
        doc = metrics.read_report(path)
        rows.append((doc["model"], doc["dataset"], doc["absrel"], doc["delta1"], doc["rmse"]))
    table = metrics.format_report_table(rows)
    if len(rows) > 1:
        base = rows[0][2]
        lines = [f"AbsRel change vs {rows[0][0]}:"]
        for model, _, absrel, _, _ in rows[1:]:
            lines.append(f"  {model}: {100.0 * (absrel - base) / base:+.1f} %")
        table = table + "\n\n" + "\n".join(lines)
    print(table)
    if args.output:
        out = _resolve_output(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(table + "\n")
    return 0


def cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.series:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"series does not exist: {path}")
        records = metrics.read_error_vs_depth_csv(path)
        if records:
            xs, ys = zip(*records)
        else:
            xs, ys = [], []
        ax.scatter(xs, ys, s=12, label=path.stem)
    ax.set_xlabel("mean scene depth [m]")
    ax.set_ylabel("AbsRel")
    ax.legend()
    fig.tight_layout()
    out = _resolve_output(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120)
    logger.info("wrote %s", out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radardepth",
                                     description="Radar-augmented monocular depth toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--output", "-o", required=True, help="dataset directory")
    p_synth.add_argument("--scenes", type=int, default=4)
    p_synth.add_argument("--samples-per-scene", type=int, default=10000 // 4,
                         help="samples per scene (scenes x samples = dataset size)")
    p_synth.add_argument("--image-size", default="640x480")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)

    p_train = sub.add_parser("train", help="train a model variant")
    p_train.add_argument("--dataset", required=True, help="training dataset directory")
    p_train.add_argument("--val-dataset", required=True, help="validation dataset directory")
    p_train.add_argument("--output", "-o", required=True, help="run directory")
    p_train.add_argument("--preset", default="toy-S", help="model preset (toy-S or toy-B)")
    p_train.add_argument("--variant", default="ours",
                         help="ours (radar fusion) or metric-baseline (radar zeroed)")
    p_train.add_argument("--config", help="flat key = value training config file")
    p_train.add_argument("--epochs", type=int)
    p_train.add_argument("--steps-per-epoch", dest="steps_per_epoch", type=int)
    p_train.add_argument("--batch-size", dest="batch_size", type=int)
    p_train.add_argument("--base-lr", dest="base_lr", type=float)
    p_train.add_argument("--seed", type=int)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--variant", default="ours", choices=VARIANTS)
    p_eval.add_argument("--output", "-o", required=True)
    p_eval.add_argument("--subsample", type=int, default=10)
    p_eval.add_argument("--dump-predictions", action="store_true")
    p_eval.set_defaults(func=cmd_eval)

    p_cmp = sub.add_parser("compare", help="tabulate evaluation reports side by side")
    p_cmp.add_argument("reports", nargs="+")
    p_cmp.add_argument("--output")
    p_cmp.set_defaults(func=cmd_compare)

    p_plot = sub.add_parser("plot", help="render error-vs-depth series to an image")
    p_plot.add_argument("series", nargs="+")
    p_plot.add_argument("--output", "-o", required=True)
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure, single-line diagnostic
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
