"""Training: scale-invariant log loss, polynomial LR decay with dual parameter
groups, the epoch loop with per-step radar resampling, and checkpoint selection."""

import logging
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import torch

from .metrics import MetricAccumulator, valid_mask
from .model.checkpoint import save_checkpoint
from .model.fusion import fuse_with_mean
from .model.network import param_groups
from .radar import rasterize
from .scene.radarsim import synthesize_radar

logger = logging.getLogger(__name__)

METRICS_LOG_HEADER = "epoch,train_loss_mean,val_absrel,val_delta1,val_rmse,lr_pretrained,lr_new"


class TrainingDivergedError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    epochs: int = 25
    steps_per_epoch: int = 200
    batch_size: int = 4
    base_lr: float = 5e-6
    new_param_lr_multiplier: float = 10.0
    poly_power: float = 0.9
    silog_lambda: float = 0.85
    silog_alpha: float = 10.0
    # initial weight of an auxiliary loss on the raw depth head, decayed
    # linearly to zero over training; stands in for the pretrained depth
    # backbone when training from scratch (without it the fused loss alone
    # starves the depth head through the weight gate)
    aux_d0_weight: float = 0.5
    # epochs during which the weight head stays frozen at its trusting init,
    # so the gate only starts arbitrating once the depth head is competent
    w_freeze_epochs: int = 0
    # random flips/90-degree rotations of training frames (square images)
    augment: int = 1
    seed: int = 0

    def __post_init__(self):
        if min(self.epochs, self.steps_per_epoch, self.batch_size) < 1:
            raise ValueError("epochs, steps_per_epoch and batch_size must be >= 1")
        if not 0.0 < self.silog_lambda <= 1.0:
            raise ValueError(f"silog_lambda must be in (0, 1], got {self.silog_lambda}")
        if self.base_lr <= 0:
            raise ValueError(f"base_lr must be positive, got {self.base_lr}")
        if self.aux_d0_weight < 0:
            raise ValueError(f"aux_d0_weight must be >= 0, got {self.aux_d0_weight}")


def read_train_config(path) -> TrainConfig:
    """Parse a flat key = value config file; keys match TrainConfig field names."""
    known = {f.name: f.type for f in fields(TrainConfig)}
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        caster = int if known[key] == int or known[key] == "int" else float
        overrides[key] = caster(value)
    return TrainConfig(**overrides)


def write_train_config(path, config: TrainConfig):
    lines = [f"{f.name} = {getattr(config, f.name)!r}" for f in fields(TrainConfig)]
    Path(path).write_text("\n".join(lines) + "\n")


def silog_loss(pred, gt, mask, lam=0.85, alpha=10.0):
    """Scale-invariant log loss: alpha * sqrt(mean(g^2) - lam * mean(g)^2),
    g = log(pred) - log(gt) over the mask."""
    p = pred[mask]
    g = gt[mask]
    if p.numel() == 0:
        raise ValueError("mask selects no pixels")
    if bool((p <= 0).any()) or bool((g <= 0).any()):
        raise ValueError("pred and gt must be positive on the mask")
    d = torch.log(p) - torch.log(g)
    mu = d.mean()
    # variance form of mean(d^2) - lam * mean(d)^2; stable when d is constant
    spread = ((d - mu) ** 2).mean() + (1.0 - lam) * mu ** 2
    return alpha * torch.sqrt(torch.clamp(spread, min=0.0))


def lr_at_step(step, total_steps, base, power=0.9) -> float:
    """Polynomial decay: base * (1 - step/total)^power; reaches zero at the end."""
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    return base * (1.0 - step / total_steps) ** power


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    val_absrel: float
    checkpoint: str


@dataclass
class ValidationHistory:
    records: list

    def __post_init__(self):
        epochs = [r.epoch for r in self.records]
        if any(b <= a for a, b in zip(epochs, epochs[1:])):
            raise ValueError("epoch indices must be strictly increasing")


def select_best_checkpoint(history: ValidationHistory) -> str:
    """Checkpoint of the lowest validation AbsRel; ties go to the earliest epoch."""
    if not history.records:
        raise ValueError("empty validation history")
    best = min(history.records, key=lambda r: (r.val_absrel, r.epoch))
    return best.checkpoint


def _radar_channel(observations, shape, radius):
    return rasterize(observations, shape, radius).astype(np.float32)


def _dihedral_raster(arr, k, flip):
    """Rotate by k*90 degrees then optionally mirror; works on (H,W) and (H,W,C)."""
    out = np.rot90(arr, k)
    if flip:
        out = out[:, ::-1]
    return np.ascontiguousarray(out)


def _dihedral_pixel(u, v, size, k, flip):
    """Pixel coordinates under the same transform as _dihedral_raster (square images)."""
    for _ in range(k % 4):
        u, v = v, size - 1 - u
    if flip:
        u = size - 1 - u
    return u, v


def _batch_inputs(dataset, indices, use_radar, radar_rng_key, augment=False):
    """Stack a training batch; radar is resampled per step from frame corners."""
    rgbs, radars, gts, means = [], [], [], []
    aug_rng = np.random.default_rng([*radar_rng_key, 0xA6]) if augment else None
    for slot, idx in enumerate(indices):
        frame = dataset.frame(idx)
        rgb, depth = frame["rgb"], frame["depth"]
        corners = dataset.corners(idx) if use_radar else None
        h, w = depth.shape
        if augment and h == w:
            k = int(aug_rng.integers(0, 4))
            flip = bool(aug_rng.integers(0, 2))
            rgb = _dihedral_raster(rgb, k, flip)
            depth = _dihedral_raster(depth, k, flip)
            if corners is not None:
                moved = [_dihedral_pixel(c.u, c.v, h, k, flip) for c in corners]
                corners = [c.__class__(u=mu, v=mv, score=c.score)
                           for c, (mu, mv) in zip(corners, moved)]
        rgbs.append(rgb.transpose(2, 0, 1))
        gts.append(depth)
        if use_radar:
            obs = synthesize_radar(corners, depth, rng_seed=[*radar_rng_key, slot])
            radars.append(_radar_channel(obs, (h, w), dataset.disk_radius))
            means.append(np.mean([o.depth for o in obs]))
        else:
            radars.append(np.zeros((h, w), dtype=np.float32))
            means.append(0.0)
    x = torch.from_numpy(np.stack([np.concatenate([rgb, radar[None]], axis=0)
                                   for rgb, radar in zip(rgbs, radars)]))
    gt = torch.from_numpy(np.stack(gts))
    mean = torch.tensor(means, dtype=torch.float32).view(-1, 1, 1)
    return x, gt, mean


def predict_frames(model, dataset, indices=None, use_radar=True, batch_size=8):
    """Run the model over dataset frames; yields (frame, d0, w, fused) with
    NumPy maps. Radar comes from the precomputed per-frame observations."""
    if indices is None:
        indices = range(len(dataset))
    indices = list(indices)
    model.eval()
    with torch.no_grad():
        for start in range(0, len(indices), batch_size):
            chunk = indices[start:start + batch_size]
            frames = [dataset.frame(i) for i in chunk]
            xs, means = [], []
            for frame in frames:
                h, w = frame["depth"].shape
                obs = frame["observations"] if use_radar else []
                radar = _radar_channel(obs, (h, w), dataset.disk_radius)
                xs.append(np.concatenate([frame["rgb"].transpose(2, 0, 1), radar[None]], axis=0))
                means.append(np.mean([o.depth for o in obs]) if obs else 0.0)
            x = torch.from_numpy(np.stack(xs))
            d0, w_map = model(x)
            d0 = d0.numpy()
            w_map = w_map.numpy() if w_map is not None else None
            for j, frame in enumerate(frames):
                obs = frame["observations"] if use_radar else []
                if w_map is not None and obs:
                    fused = fuse_with_mean(d0[j], w_map[j], means[j])
                else:
                    fused = d0[j]
                yield frame, d0[j], (w_map[j] if w_map is not None else None), fused


def validate(model, dataset, use_radar=True):
    """Pooled AbsRel / delta1 / RMSE of the fused prediction over a dataset."""
    acc = MetricAccumulator()
    for frame, _, _, fused in predict_frames(model, dataset, use_radar=use_radar):
        gt = frame["depth"]
        acc.add_frame(frame["id"], fused, gt, valid_mask(gt))
    return acc.report()


def train(model, datasets, config: TrainConfig, out_dir, use_radar=True,
          log_path=None) -> ValidationHistory:
    """Train with Adam and the dual-rate polynomial schedule.

    datasets is a (train_dataset, val_dataset) pair. Radar observations are
    resampled every step from each frame's corner features. One checkpoint is
    written per epoch; the returned history drives best-checkpoint selection.
    """
    train_ds, val_ds = datasets
    if len(train_ds) == 0 or len(val_ds) == 0:
        raise ValueError("datasets must be nonempty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if log_path is None:
        log_path = out_dir / "metrics.log"

    torch.manual_seed(config.seed)
    pretrained, new = param_groups(model)
    optimizer = torch.optim.Adam(
        [{"params": pretrained, "lr": config.base_lr},
         {"params": new, "lr": config.base_lr * config.new_param_lr_multiplier}],
        betas=(0.9, 0.999), eps=1e-8,
    )
    all_params = pretrained + new
    total_steps = config.epochs * config.steps_per_epoch
    order_rng = np.random.default_rng([config.seed, 0xD5])

    freezable = getattr(model, "w_conv", None) is not None and use_radar
    with open(log_path, "w") as log_file:
        log_file.write(METRICS_LOG_HEADER + "\n")
        records = []
        for epoch in range(config.epochs):
            if freezable:
                frozen = epoch < config.w_freeze_epochs
                model.w_conv.weight.requires_grad_(not frozen)
                model.w_conv.bias.requires_grad_(not frozen)
            model.train()
            losses = []
            lr = config.base_lr
            for step in range(config.steps_per_epoch):
                global_step = epoch * config.steps_per_epoch + step
                lr = lr_at_step(global_step, total_steps, config.base_lr, config.poly_power)
                optimizer.param_groups[0]["lr"] = lr
                optimizer.param_groups[1]["lr"] = lr * config.new_param_lr_multiplier

                indices = order_rng.integers(0, len(train_ds), size=config.batch_size)
                x, gt, mean = _batch_inputs(train_ds, indices, use_radar,
                                            radar_rng_key=[config.seed, epoch, step],
                                            augment=bool(config.augment))
                d0, w_map = model(x)
                mask = torch.from_numpy(valid_mask(gt.numpy()))
                if use_radar:
                    pred = fuse_with_mean(d0, w_map, mean)
                    loss = silog_loss(pred, gt, mask, config.silog_lambda, config.silog_alpha)
                    aux = config.aux_d0_weight * (1.0 - global_step / total_steps)
                    if aux > 0:
                        loss = loss + aux * silog_loss(
                            d0, gt, mask, config.silog_lambda, config.silog_alpha)
                else:
                    loss = silog_loss(d0, gt, mask, config.silog_lambda, config.silog_alpha)
                if not torch.isfinite(loss):
                    raise TrainingDivergedError(
                        f"non-finite loss at epoch {epoch} step {step}: {loss.item()}")
                optimizer.zero_grad()
                loss.backward()
                torch.nn.utils.clip_grad_norm_(
                    [p for p in all_params if p.grad is not None], max_norm=1.0)
                optimizer.step()
                losses.append(float(loss.detach()))

            report = validate(model, val_ds, use_radar=use_radar)
            ckpt_path = out_dir / f"checkpoint_epoch{epoch:03d}.npz"
            save_checkpoint(ckpt_path, model,
                            extra={"epoch": epoch, "val_absrel": report.absrel})
            records.append(EpochRecord(epoch=epoch, val_absrel=report.absrel,
                                       checkpoint=str(ckpt_path)))
            row = (f"{epoch},{np.mean(losses)!r},{report.absrel!r},{report.delta1!r},"
                   f"{report.rmse!r},{lr!r},{lr * config.new_param_lr_multiplier!r}")
            log_file.write(row + "\n")
            log_file.flush()
            logger.info("epoch %d: loss %.4f, val absrel %.4f", epoch,
                        float(np.mean(losses)), report.absrel)

    return ValidationHistory(records=records)
