"""File formats: radar logs, calibration files, float rasters and RGB images."""

import csv
from pathlib import Path

import numpy as np
import yaml
from PIL import Image

from .geometry import CameraIntrinsics, RigidTransform
from .radar import PixelObservation, RadarReturn

RADAR_LOG_HEADER = ["timestamp_s", "x_m", "y_m", "z_m", "snr_db"]
OBSERVATION_HEADER = ["u", "v", "depth_m"]


def read_radar_log(path):
    """Read a delimited radar log (header row required) into RadarReturn objects."""
    path = Path(path)
    with path.open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != RADAR_LOG_HEADER:
            raise ValueError(f"{path}: expected header {','.join(RADAR_LOG_HEADER)}, got {header}")
        returns = []
        for row in reader:
            if not row:
                continue
            t, x, y, z, snr = (float(v) for v in row)
            returns.append(RadarReturn(position=np.array([x, y, z]), snr_db=snr, timestamp=t))
    return returns


def write_radar_log(path, returns):
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(RADAR_LOG_HEADER)
        for r in returns:
            writer.writerow([repr(r.timestamp), *(repr(float(c)) for c in r.position), repr(r.snr_db)])


def read_observations(path):
    """Read projected radar observations (u, v, depth columns)."""
    path = Path(path)
    with path.open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != OBSERVATION_HEADER:
            raise ValueError(f"{path}: expected header {','.join(OBSERVATION_HEADER)}, got {header}")
        return [
            PixelObservation(u=float(u), v=float(v), depth=float(d))
            for u, v, d in (row for row in reader if row)
        ]


def write_observations(path, observations):
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(OBSERVATION_HEADER)
        for obs in observations:
            writer.writerow([repr(float(obs.u)), repr(float(obs.v)), repr(float(obs.depth))])


def read_calibration(path):
    """Read intrinsics + radar-to-camera extrinsics from a YAML calibration file."""
    with Path(path).open() as f:
        doc = yaml.safe_load(f)
    try:
        intr = doc["intrinsics"]
        extr = doc["extrinsics"]
        intrinsics = CameraIntrinsics(
            fx=float(intr["fx"]), fy=float(intr["fy"]),
            cx=float(intr["cx"]), cy=float(intr["cy"]),
            width=int(intr["width"]), height=int(intr["height"]),
        )
        rotation = np.asarray(extr["rotation"], dtype=np.float64).reshape(3, 3)
        translation = np.asarray(extr["translation"], dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed calibration file ({exc})") from exc
    return intrinsics, RigidTransform(rotation=rotation, translation=translation)


def write_calibration(path, intrinsics: CameraIntrinsics, extrinsics: RigidTransform):
    doc = {
        "intrinsics": {
            "fx": float(intrinsics.fx), "fy": float(intrinsics.fy),
            "cx": float(intrinsics.cx), "cy": float(intrinsics.cy),
            "width": int(intrinsics.width), "height": int(intrinsics.height),
        },
        "extrinsics": {
            # row-major 3x3 rotation, radar -> camera
            "rotation": [float(v) for v in np.asarray(extrinsics.rotation).reshape(-1)],
            "translation": [float(v) for v in np.asarray(extrinsics.translation)],
        },
    }
    with Path(path).open("w") as f:
        yaml.safe_dump(doc, f, sort_keys=True)


def save_depth_raster(path, depth):
    """Persist a single-channel depth map as a 32-bit float raster (meters, 0 = no data)."""
    np.save(path, np.asarray(depth, dtype=np.float32))


def load_depth_raster(path):
    depth = np.load(path)
    if depth.ndim != 2:
        raise ValueError(f"{path}: expected a single-channel raster, got shape {depth.shape}")
    return depth.astype(np.float32)


def save_rgb(path, rgb):
    """Save an RGB image given as float array in [0, 1] (HxWx3) as 8-bit PNG."""
    arr = np.clip(np.asarray(rgb) * 255.0 + 0.5, 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path)


def load_rgb(path):
    """Load an 8-bit RGB image as float array in [0, 1]."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32)
    return arr / 255.0
