"""Radar return filtering, accumulation, pinhole projection and sparse-depth rasterization.

The radar emits a handful of 3D points per frame with a per-point SNR. This
module turns a batch of returns into the single-channel sparse-depth image
that feeds the network: filter by SNR, accumulate a few frames, project into
the image with the calibrated extrinsics, and paint each surviving point as a
small disk carrying its camera-frame depth.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import CameraIntrinsics, RigidTransform

SNR_CUTOFF_DB = 15.0
ACCUMULATION_WINDOW = 3
DISK_RADIUS_PX = 5


class NoRadarReturnsError(ValueError):
    """Raised when an operation that needs at least one radar observation gets none."""


@dataclass(frozen=True, eq=False)
class RadarReturn:
    """One radar point: 3D position in the radar frame, SNR and timestamp."""

    position: np.ndarray  # (3,) meters, radar frame
    snr_db: float
    timestamp: float

    def __eq__(self, other):
        if not isinstance(other, RadarReturn):
            return NotImplemented
        return (np.array_equal(self.position, other.position)
                and self.snr_db == other.snr_db and self.timestamp == other.timestamp)

    def __post_init__(self):
        position = np.asarray(self.position, dtype=np.float64)
        if position.shape != (3,):
            raise ValueError(f"position must be a 3-vector, got shape {position.shape}")
        if not np.all(np.isfinite(position)):
            raise ValueError("position must be finite")
        if not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")
        object.__setattr__(self, "position", position)


@dataclass(frozen=True)
class PixelObservation:
    """A radar return projected into the image: continuous pixel coords + z-depth."""

    u: float
    v: float
    depth: float

    def __post_init__(self):
        if not self.depth > 0:
            raise ValueError(f"depth must be positive, got {self.depth}")


def filter_by_snr(returns, cutoff_db=SNR_CUTOFF_DB):
    """Keep returns with snr_db >= cutoff_db (inclusive), preserving order."""
    if not np.isfinite(cutoff_db):
        raise ValueError("cutoff_db must be finite")
    return [r for r in returns if r.snr_db >= cutoff_db]


def accumulate_frames(frame_sequence, window=ACCUMULATION_WINDOW):
    """Concatenate the last `window` frames of returns (no motion compensation)."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    out = []
    for frame in frame_sequence[-window:]:
        out.extend(frame)
    return out


def project_to_image(returns, intrinsics: CameraIntrinsics, extrinsics: RigidTransform):
    """Project radar returns through extrinsics + pinhole intrinsics.

    Points behind the camera (z <= 0) and outside [0, width) x [0, height)
    are discarded. Depth is the camera-frame z coordinate.
    """
    if not returns:
        return []
    positions = np.stack([r.position for r in returns])
    cam = extrinsics.apply(positions)
    out = []
    for x, y, z in cam:
        if z <= 0:
            continue
        u = intrinsics.fx * x / z + intrinsics.cx
        v = intrinsics.fy * y / z + intrinsics.cy
        if 0.0 <= u < intrinsics.width and 0.0 <= v < intrinsics.height:
            out.append(PixelObservation(u=u, v=v, depth=z))
    return out


def rasterize(observations, shape, radius=DISK_RADIUS_PX):
    """Paint each observation as a filled disk of its depth; zeros mean no data.

    Disk centers are the rounded pixel coordinates; where disks overlap the
    smaller depth wins (nearer surface dominates).
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    height, width = shape
    grid = np.zeros((height, width), dtype=np.float64)
    if not observations:
        return grid
    offsets = _disk_offsets(radius)
    for obs in observations:
        cu = int(np.rint(obs.u))
        cv = int(np.rint(obs.v))
        xs = cu + offsets[:, 0]
        ys = cv + offsets[:, 1]
        valid = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
        xs, ys = xs[valid], ys[valid]
        current = grid[ys, xs]
        paint = (current == 0.0) | (obs.depth < current)
        grid[ys[paint], xs[paint]] = obs.depth
    return grid


def _disk_offsets(radius):
    r = int(np.ceil(radius))
    span = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(span, span)
    keep = dx * dx + dy * dy <= radius * radius
    return np.stack([dx[keep], dy[keep]], axis=1)


def radar_mean_depth(observations) -> float:
    """Arithmetic mean of the observation depths; the scalar radar anchor."""
    if not observations:
        raise NoRadarReturnsError("no radar observations to average")
    return float(np.mean([obs.depth for obs in observations]))
