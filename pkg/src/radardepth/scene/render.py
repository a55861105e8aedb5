"""Per-pixel ray-cast rendering of RGB and ground-truth z-depth images."""

import numpy as np

from ..geometry import CameraIntrinsics
from .pose import CameraPose
from .raycast import raycast_heightfield
from .terrain import TerrainScene, surface_normal_at, texture_at

AMBIENT = 0.12
HIT_TOL = 1e-9
DT_MIN = 1e-2


class RenderCoverageError(RuntimeError):
    """A ray missed the terrain: the pose violates the full-coverage precondition."""


def pixel_ray_dirs(pose: CameraPose, intrinsics: CameraIntrinsics) -> np.ndarray:
    """World-frame ray directions per pixel, scaled so the ray parameter equals
    camera-frame z-depth. Shape (H*W, 3), row-major over (v, u)."""
    us = (np.arange(intrinsics.width) - intrinsics.cx) / intrinsics.fx
    vs = (np.arange(intrinsics.height) - intrinsics.cy) / intrinsics.fy
    uu, vv = np.meshgrid(us, vs)
    dirs_cam = np.stack([uu, vv, np.ones_like(uu)], axis=-1).reshape(-1, 3)
    return dirs_cam @ pose.cam_to_world.T


def render_depth_rgb(scene: TerrainScene, pose: CameraPose, intrinsics: CameraIntrinsics,
                     raycast=raycast_heightfield):
    """Render (rgb, depth) with Lambertian shading of the terrain albedo.

    depth holds the camera-frame z of the first intersection per pixel, in
    meters. Raises RenderCoverageError if any ray fails to hit the terrain.
    """
    dirs = pixel_ray_dirs(pose, intrinsics)
    descent = -dirs[:, 2]
    if descent.min() <= 0.0:
        raise RenderCoverageError("some rays never descend; pose violates full coverage")
    origin = pose.position
    drop = origin[2] - scene.min_height
    t_max = 1.05 * float(drop / descent.min()) + 1.0

    t = raycast(scene.heightfield, scene.cell_size, origin, dirs,
                t_max=t_max, slope_bound=scene.slope_bound(),
                hit_tol=HIT_TOL, dt_min=DT_MIN)
    if not np.all(np.isfinite(t)):
        raise RenderCoverageError(f"{int(np.sum(~np.isfinite(t)))} rays missed the terrain")

    depth = t.reshape(intrinsics.height, intrinsics.width)

    hits = origin[None, :] + t[:, None] * dirs
    hx, hy = hits[:, 0], hits[:, 1]
    albedo = texture_at(scene, hx, hy)
    normals = surface_normal_at(scene, hx, hy)
    lambert = np.maximum(normals @ scene.light_dir, 0.0)
    shade = AMBIENT + (1.0 - AMBIENT) * lambert
    rgb = np.clip(albedo * shade[:, None], 0.0, 1.0)
    rgb = rgb.reshape(intrinsics.height, intrinsics.width, 3)
    return rgb, depth
