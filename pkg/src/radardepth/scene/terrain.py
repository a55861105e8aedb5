"""Procedural terrain scenes: a periodic heightfield plus an albedo texture.

Scenes are built so that absolute scale is unobservable from appearance:
the heightfield amplitude and the texture feature size are both proportional
to the scene extent, and the extent itself carries a per-scene random scale
multiplier. Two scenes that differ only in that multiplier render identical
images from similarity-scaled camera poses, while their metric depths differ
by the multiplier — radar is then the only scale cue.
"""

from dataclasses import dataclass

import numpy as np

from .noise import octave_noise

DEFAULT_GRID = 256
DEFAULT_BASE_EXTENT_M = 120.0
DEFAULT_SCALE_RANGE = (0.35, 3.5)
DEFAULT_RELIEF_RANGE = (0.10, 0.28)  # peak-to-peak height as fraction of extent


@dataclass
class TerrainScene:
    """Periodic heightfield terrain with a color texture.

    heightfield: (H_g, W_g) elevations in meters; tiles seamlessly.
    texture: (H_g, W_g, 3) albedo in [0, 1].
    extent: physical side length in meters covered by the grid's W_g cells.
    light_dir: unit vector from the surface toward the light (world frame, z up).
    """

    heightfield: np.ndarray
    texture: np.ndarray
    extent: float
    light_dir: np.ndarray

    def __post_init__(self):
        self.heightfield = np.asarray(self.heightfield, dtype=np.float64)
        if self.heightfield.ndim != 2:
            raise ValueError("heightfield must be 2D")
        if not np.all(np.isfinite(self.heightfield)):
            raise ValueError("heightfield must be finite")
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent}")
        self.texture = np.asarray(self.texture, dtype=np.float64)
        if self.texture.shape != (*self.heightfield.shape, 3):
            raise ValueError("texture must be (H_g, W_g, 3)")

    @property
    def cell_size(self) -> float:
        return self.extent / self.heightfield.shape[1]

    @property
    def min_height(self) -> float:
        return float(self.heightfield.min())

    @property
    def max_height(self) -> float:
        return float(self.heightfield.max())

    def slope_bound(self) -> float:
        """Upper bound on |grad h| of the bilinear surface (per-cell differences)."""
        h = self.heightfield
        dx = np.abs(np.roll(h, -1, axis=1) - h).max()
        dy = np.abs(np.roll(h, -1, axis=0) - h).max()
        return max(dx, dy) / self.cell_size


def height_at(scene: TerrainScene, x, y):
    """Bilinear, periodic height lookup at world coordinates (meters)."""
    return _bilinear_periodic(scene.heightfield, x, y, scene.cell_size)


def texture_at(scene: TerrainScene, x, y):
    """Bilinear, periodic albedo lookup at world coordinates; returns (..., 3)."""
    channels = [
        _bilinear_periodic(scene.texture[:, :, c], x, y, scene.cell_size)
        for c in range(3)
    ]
    return np.stack(channels, axis=-1)


def surface_normal_at(scene: TerrainScene, x, y):
    """Outward (upward) unit normal of the height surface, via central differences."""
    eps = 0.5 * scene.cell_size
    dhdx = (height_at(scene, x + eps, y) - height_at(scene, x - eps, y)) / (2 * eps)
    dhdy = (height_at(scene, x, y + eps) - height_at(scene, x, y - eps)) / (2 * eps)
    n = np.stack([-dhdx, -dhdy, np.ones_like(dhdx)], axis=-1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def _bilinear_periodic(grid, x, y, cell):
    grid = np.asarray(grid)
    rows, cols = grid.shape
    gx = np.asarray(x, dtype=np.float64) / cell
    gy = np.asarray(y, dtype=np.float64) / cell
    ix0 = np.floor(gx).astype(np.int64)
    iy0 = np.floor(gy).astype(np.int64)
    fx = gx - ix0
    fy = gy - iy0
    ix0 = np.mod(ix0, cols)
    iy0 = np.mod(iy0, rows)
    ix1 = np.mod(ix0 + 1, cols)
    iy1 = np.mod(iy0 + 1, rows)
    v00 = grid[iy0, ix0]
    v01 = grid[iy0, ix1]
    v10 = grid[iy1, ix0]
    v11 = grid[iy1, ix1]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    return top * (1.0 - fy) + bot * fy


def make_scene(
    seed,
    grid=DEFAULT_GRID,
    base_extent=DEFAULT_BASE_EXTENT_M,
    scale_range=DEFAULT_SCALE_RANGE,
    relief_range=DEFAULT_RELIEF_RANGE,
):
    """Generate a deterministic TerrainScene from a seed.

    The scale multiplier is sampled log-uniformly from scale_range and applied
    to both extent and heights, keeping the shape (and thus the rendered
    appearance) scale-free.
    """
    rng = np.random.default_rng(seed)
    scale = float(np.exp(rng.uniform(np.log(scale_range[0]), np.log(scale_range[1]))))
    extent = base_extent * scale
    relief_frac = rng.uniform(*relief_range)

    # few low-frequency octaves: large smooth landforms whose shape a small
    # model can read from shading and strata, while absolute scale stays hidden
    base = octave_noise((grid, grid), rng, octaves=4, base_lattice=4, persistence=0.5)
    heightfield = base * (relief_frac * extent)

    texture = _make_texture(grid, rng, base)
    az = rng.uniform(0.0, 2.0 * np.pi)
    el = rng.uniform(np.deg2rad(35.0), np.deg2rad(75.0))
    light_dir = np.array([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)])

    return TerrainScene(heightfield=heightfield, texture=texture, extent=extent,
                        light_dir=light_dir)


def _make_texture(grid, rng, height_norm):
    """Elevation-banded albedo strata with random palette colors plus detail.

    Band boundaries mostly follow elevation contours (rock/vegetation strata),
    so corner-like structure clusters at specific elevations rather than being
    spread uniformly over the scene.
    """
    n_colors = int(rng.integers(4, 7))
    palette = rng.uniform(0.15, 0.95, size=(n_colors, 3))
    wobble = octave_noise((grid, grid), rng, octaves=4, base_lattice=6)
    patch_field = 0.65 * height_norm + 0.35 * wobble
    lo, hi = patch_field.min(), patch_field.max()
    patch_field = (patch_field - lo) / max(hi - lo, 1e-12)
    bands = np.minimum((patch_field * n_colors).astype(np.int64), n_colors - 1)
    albedo = palette[bands]
    # keep fine detail subtle so Lambertian shading stays a usable shape cue
    detail = 0.9 + 0.2 * octave_noise((grid, grid), rng, octaves=3, base_lattice=16)
    return np.clip(albedo * detail[:, :, None], 0.0, 1.0)
