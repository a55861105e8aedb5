"""Dataset generation and loading: RGB + depth tuples with precomputed radar.

Each dataset directory holds a JSON manifest plus per-sample files: an 8-bit
PNG, a float32 depth raster and a small CSV of projected radar observations.
Every random choice is keyed by seeds recorded in the manifest, so a dataset
regenerates bit-identically.
"""

import json
from pathlib import Path

import numpy as np

from .. import dataio
from ..geometry import default_intrinsics
from ..radar import DISK_RADIUS_PX
from .corners import DEFAULT_MAX_CORNERS, detect_corners
from .pose import sample_pose
from .radarsim import synthesize_radar
from .render import render_depth_rgb
from .terrain import DEFAULT_SCALE_RANGE, make_scene

MANIFEST_NAME = "manifest.json"
FORMAT_TAG = "radardepth-dataset-v1"
MAX_POSE_REGENERATIONS = 50  # retries when a rendered view has no corners


class DatasetError(RuntimeError):
    pass


def generate_dataset(out_dir, n_scenes, samples_per_scene, image_size=(640, 480),
                     seed=0, scale_range=DEFAULT_SCALE_RANGE,
                     max_corners=DEFAULT_MAX_CORNERS, disk_radius=DISK_RADIUS_PX):
    """Write a dataset of n_scenes x samples_per_scene rendered samples.

    image_size is (width, height). Returns the manifest dict.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    width, height = image_size
    intrinsics = default_intrinsics(width, height)
    seed = int(seed)

    samples = []
    for si in range(n_scenes):
        scene_seed = [seed, si]
        scene = make_scene(scene_seed, scale_range=scale_range)
        for fi in range(samples_per_scene):
            sample_id = f"s{si:03d}_f{fi:03d}"
            radar_seed = [seed, si, fi, 1]
            rgb = depth32 = corners = None
            pose_seed = None
            for attempt in range(MAX_POSE_REGENERATIONS):
                pose_seed = [seed, si, fi, 0, attempt]
                pose = sample_pose(scene, pose_seed, intrinsics)
                rgb, depth = render_depth_rgb(scene, pose, intrinsics)
                depth32 = depth.astype(np.float32)
                corners = detect_corners(rgb, max_corners)
                if corners:
                    break
            else:
                raise DatasetError(f"{sample_id}: no corners after {MAX_POSE_REGENERATIONS} poses")

            # synthesize from the float32 raster so stored radar depths match it exactly
            observations = synthesize_radar(corners, depth32, radar_seed)

            rgb_name = f"{sample_id}_rgb.png"
            depth_name = f"{sample_id}_depth.npy"
            radar_name = f"{sample_id}_radar.csv"
            dataio.save_rgb(out_dir / rgb_name, rgb)
            dataio.save_depth_raster(out_dir / depth_name, depth32)
            dataio.write_observations(out_dir / radar_name, observations)
            samples.append({
                "id": sample_id,
                "scene_seed": scene_seed,
                "pose_seed": pose_seed,
                "radar_seed": radar_seed,
                "rgb": rgb_name,
                "depth": depth_name,
                "radar": radar_name,
            })

    manifest = {
        "format": FORMAT_TAG,
        "seed": seed,
        "n_scenes": n_scenes,
        "samples_per_scene": samples_per_scene,
        "image_size": [int(width), int(height)],
        "intrinsics": {
            "fx": intrinsics.fx, "fy": intrinsics.fy,
            "cx": intrinsics.cx, "cy": intrinsics.cy,
            "width": intrinsics.width, "height": intrinsics.height,
        },
        "scale_range": list(scale_range),
        "max_corners": max_corners,
        "disk_radius_px": disk_radius,
        "samples": samples,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


class DepthDataset:
    """Read access to a generated dataset; frames and corners are cached."""

    def __init__(self, root):
        self.root = Path(root)
        manifest_path = self.root / MANIFEST_NAME
        if not manifest_path.exists():
            raise DatasetError(f"no {MANIFEST_NAME} in {self.root}")
        self.manifest = json.loads(manifest_path.read_text())
        if self.manifest.get("format") != FORMAT_TAG:
            raise DatasetError(f"{manifest_path}: unknown dataset format")
        self.samples = self.manifest["samples"]
        self.disk_radius = self.manifest.get("disk_radius_px", DISK_RADIUS_PX)
        self.max_corners = self.manifest.get("max_corners", DEFAULT_MAX_CORNERS)
        self._frames = {}
        self._corners = {}

    def __len__(self):
        return len(self.samples)

    @property
    def image_size(self):
        """(width, height)"""
        return tuple(self.manifest["image_size"])

    def frame(self, i):
        """dict with rgb (H,W,3) float32, depth (H,W) float32, observations."""
        if i not in self._frames:
            rec = self.samples[i]
            self._frames[i] = {
                "id": rec["id"],
                "rgb": dataio.load_rgb(self.root / rec["rgb"]),
                "depth": dataio.load_depth_raster(self.root / rec["depth"]),
                "observations": dataio.read_observations(self.root / rec["radar"]),
            }
        return self._frames[i]

    def corners(self, i):
        if i not in self._corners:
            self._corners[i] = detect_corners(self.frame(i)["rgb"], self.max_corners)
        return self._corners[i]
