"""Depth evaluation metrics against (possibly sparse) ground truth.

Joint metrics pool all masked pixels across frames, so the combined numbers
equal the pixel-count-weighted combination of per-frame metrics.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DELTA1_THRESHOLD = 1.25


def valid_mask(gt) -> np.ndarray:
    """Pixels with usable ground truth: positive and finite."""
    gt = np.asarray(gt)
    return np.isfinite(gt) & (gt > 0)


def _masked(pred, gt, mask):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if pred.shape != gt.shape or pred.shape != mask.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape}, gt {gt.shape}, mask {mask.shape}")
    p, g = pred[mask], gt[mask]
    if p.size == 0:
        raise ValueError("mask selects no pixels")
    return p, g


def abs_rel(pred, gt, mask) -> float:
    """Mean of |pred - gt| / gt over the mask."""
    p, g = _masked(pred, gt, mask)
    if np.any(g <= 0):
        raise ValueError("ground truth must be positive on the mask")
    return float(np.mean(np.abs(p - g) / g))


def delta_ratio(pred, gt, mask, threshold=DELTA1_THRESHOLD) -> float:
    """Fraction of masked pixels with max(gt/pred, pred/gt) < threshold."""
    p, g = _masked(pred, gt, mask)
    if np.any(p <= 0) or np.any(g <= 0):
        raise ValueError("pred and ground truth must be positive on the mask")
    ratio = np.maximum(g / p, p / g)
    return float(np.mean(ratio < threshold))


def delta1(pred, gt, mask) -> float:
    return delta_ratio(pred, gt, mask, DELTA1_THRESHOLD)


def rmse(pred, gt, mask) -> float:
    """Root mean square error in meters over the mask."""
    p, g = _masked(pred, gt, mask)
    return float(np.sqrt(np.mean((p - g) ** 2)))


@dataclass
class MetricsReport:
    absrel: float
    delta1: float
    rmse: float
    n_frames: int
    per_frame: list = field(default_factory=list)  # (frame id, mean scene depth, frame AbsRel)

    def __post_init__(self):
        if not 0.0 <= self.delta1 <= 1.0:
            raise ValueError(f"delta1 must be in [0, 1], got {self.delta1}")
        if self.absrel < 0 or self.rmse < 0:
            raise ValueError("absrel and rmse must be nonnegative")
        if self.n_frames != len(self.per_frame):
            raise ValueError("n_frames must equal the number of per-frame records")


class MetricAccumulator:
    """Pools per-pixel sums across frames and keeps per-frame records."""

    def __init__(self):
        self._sum_absrel = 0.0
        self._sum_delta1 = 0.0
        self._sum_sq = 0.0
        self._count = 0
        self.per_frame = []

    def add_frame(self, frame_id, pred, gt, mask):
        p, g = _masked(pred, gt, mask)
        if np.any(p <= 0) or np.any(g <= 0):
            raise ValueError("pred and ground truth must be positive on the mask")
        rel = np.abs(p - g) / g
        self._sum_absrel += float(rel.sum())
        self._sum_delta1 += float(np.sum(np.maximum(g / p, p / g) < DELTA1_THRESHOLD))
        self._sum_sq += float(((p - g) ** 2).sum())
        self._count += p.size
        self.per_frame.append((frame_id, float(g.mean()), float(rel.mean())))

    def report(self) -> MetricsReport:
        if self._count == 0:
            raise ValueError("no frames accumulated")
        return MetricsReport(
            absrel=self._sum_absrel / self._count,
            delta1=self._sum_delta1 / self._count,
            rmse=float(np.sqrt(self._sum_sq / self._count)),
            n_frames=len(self.per_frame),
            per_frame=list(self.per_frame),
        )


@dataclass
class DatasetSummary:
    avg_sparse_depth_count: float
    gt_coverage_percent: float
    n_frames: int

    def __post_init__(self):
        if not 0.0 <= self.gt_coverage_percent <= 100.0:
            raise ValueError(f"coverage must be in [0, 100], got {self.gt_coverage_percent}")
        if self.avg_sparse_depth_count < 0 or self.n_frames < 0:
            raise ValueError("counts must be nonnegative")


def dataset_summary(frames) -> DatasetSummary:
    """Average sparse-point count and ground-truth coverage over (observations, gt_mask) frames."""
    counts, coverages = [], []
    for observations, gt_mask in frames:
        gt_mask = np.asarray(gt_mask, dtype=bool)
        counts.append(len(observations))
        coverages.append(100.0 * gt_mask.sum() / gt_mask.size)
    if not counts:
        raise ValueError("no frames to summarize")
    return DatasetSummary(
        avg_sparse_depth_count=float(np.mean(counts)),
        gt_coverage_percent=float(np.mean(coverages)),
        n_frames=len(counts),
    )


def format_summary(name, summary: DatasetSummary) -> str:
    return (f"{name}: {summary.avg_sparse_depth_count:.2f} points, "
            f"{summary.gt_coverage_percent:.2f} %, {summary.n_frames} frames")


def error_vs_depth(frames, subsample=10):
    """(mean scene depth, frame AbsRel) for every subsample-th frame."""
    if subsample < 1:
        raise ValueError(f"subsample must be >= 1, got {subsample}")
    records = []
    for i, (pred, gt, mask) in enumerate(frames):
        if i % subsample:
            continue
        p, g = _masked(pred, gt, mask)
        records.append((float(g.mean()), float(np.mean(np.abs(p - g) / g))))
    return records


def write_error_vs_depth_csv(path, records):
    lines = ["mean_scene_depth_m,absrel"]
    lines += [f"{d!r},{a!r}" for d, a in records]
    Path(path).write_text("\n".join(lines) + "\n")


def read_error_vs_depth_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "mean_scene_depth_m,absrel":
        raise ValueError(f"{path}: not an error-vs-depth series")
    return [tuple(float(v) for v in line.split(",")) for line in lines[1:]]


def write_report(path, model_name, dataset_name, report: MetricsReport):
    doc = {
        "model": model_name,
        "dataset": dataset_name,
        "absrel": report.absrel,
        "delta1": report.delta1,
        "rmse": report.rmse,
        "n_frames": report.n_frames,
        "per_frame": [
            {"frame": fid, "mean_scene_depth_m": d, "absrel": a}
            for fid, d, a in report.per_frame
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_report(path):
    return json.loads(Path(path).read_text())


def format_report_table(rows):
    """Human-readable table: one row per (model, dataset, absrel, delta1, rmse)."""
    header = f"{'Model':<20} {'Dataset':<20} {'AbsRel':>8} {'delta1':>8} {'RMSE':>8}"
    lines = [header, "-" * len(header)]
    for model, dataset, a, d, r in rows:
        lines.append(f"{model:<20} {dataset:<20} {a:>8.3f} {d:>8.3f} {r:>8.3f}")
    return "\n".join(lines)
