"""Random camera pose sampling over a terrain scene.

World frame: z up. Camera frame: x right, y down, z forward (optical axis).
Nadir means the optical axis points straight down; tilts about the camera x/y
axes and a roll about z are applied on top of that.
"""

from dataclasses import dataclass

import numpy as np

from ..geometry import CameraIntrinsics, _check_rotation, default_intrinsics, rot_x, rot_y, rot_z
from .terrain import TerrainScene, height_at

ALTITUDE_RANGE_M = (1.0, 51.0)
TILT_MAX_DEG = 22.5
DEFAULT_ATTEMPT_CAP = 1000

# Every ray must point downward by at least this (normalized z component);
# bounds the march distance so renders terminate.
MIN_DOWNWARD_COMPONENT = 0.15

# camera axes in world frame at nadir: x -> east, y -> south, z -> down
NADIR_CAM_TO_WORLD = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])


class PoseSamplingError(RuntimeError):
    """No acceptable pose found within the attempt cap."""


@dataclass(frozen=True)
class CameraPose:
    """Camera position (world, meters) and world-to-camera rotation."""

    position: np.ndarray
    orientation: np.ndarray  # 3x3, world -> camera

    def __post_init__(self):
        position = np.asarray(self.position, dtype=np.float64)
        if position.shape != (3,):
            raise ValueError(f"position must be a 3-vector, got shape {position.shape}")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "orientation", _check_rotation(self.orientation))

    @property
    def cam_to_world(self) -> np.ndarray:
        return self.orientation.T


def corner_ray_dirs(pose: CameraPose, intrinsics: CameraIntrinsics) -> np.ndarray:
    """World-frame direction vectors of the four extreme pixel rays (unnormalized)."""
    us = np.array([0.0, intrinsics.width - 1.0])
    vs = np.array([0.0, intrinsics.height - 1.0])
    dirs = np.array([
        [(u - intrinsics.cx) / intrinsics.fx, (v - intrinsics.cy) / intrinsics.fy, 1.0]
        for u in us for v in vs
    ])
    return dirs @ pose.cam_to_world.T


def full_coverage(pose: CameraPose, intrinsics: CameraIntrinsics,
                  min_down=MIN_DOWNWARD_COMPONENT) -> bool:
    """True if every image ray is guaranteed to intersect the terrain.

    The terrain is unbounded (periodic), so a ray intersects iff it descends.
    Downwardness is linear in the pixel coordinates, hence checking the four
    corner rays is exact for the whole image.
    """
    dirs = corner_ray_dirs(pose, intrinsics)
    down = -dirs[:, 2] / np.linalg.norm(dirs, axis=1)
    return bool(np.all(down >= min_down))


def orientation_from_angles(tilt_x_rad, tilt_y_rad, roll_z_rad) -> np.ndarray:
    """World-to-camera rotation for tilt-x, tilt-y, roll-z applied to the nadir frame."""
    cam_to_world = NADIR_CAM_TO_WORLD @ rot_x(tilt_x_rad) @ rot_y(tilt_y_rad) @ rot_z(roll_z_rad)
    return cam_to_world.T


def sample_pose(scene: TerrainScene, rng_seed, intrinsics: CameraIntrinsics = None,
                altitude_range=ALTITUDE_RANGE_M, tilt_max_deg=TILT_MAX_DEG,
                max_attempts=DEFAULT_ATTEMPT_CAP) -> CameraPose:
    """Sample a camera pose: uniform footprint position, altitude above the
    local surface uniform in altitude_range, per-axis tilts within
    +/- tilt_max_deg, roll over the full circle. Rejected and resampled until
    full coverage holds; deterministic given the seed.
    """
    if intrinsics is None:
        intrinsics = default_intrinsics()
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_attempts):
        x = rng.uniform(0.0, scene.extent)
        y = rng.uniform(0.0, scene.extent)
        altitude = rng.uniform(*altitude_range)
        tilt_x = np.deg2rad(rng.uniform(-tilt_max_deg, tilt_max_deg))
        tilt_y = np.deg2rad(rng.uniform(-tilt_max_deg, tilt_max_deg))
        roll_z = np.deg2rad(rng.uniform(-180.0, 180.0))
        z = float(height_at(scene, x, y)) + altitude
        pose = CameraPose(position=np.array([x, y, z]),
                          orientation=orientation_from_angles(tilt_x, tilt_y, roll_z))
        if full_coverage(pose, intrinsics):
            return pose
    raise PoseSamplingError(f"no full-coverage pose found in {max_attempts} attempts")
