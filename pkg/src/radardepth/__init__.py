"""radardepth: fusing sparse mmWave radar returns into monocular metric depth.

Subpackages: radar projection and rasterization, procedural scene synthesis,
the fusion network, training machinery, evaluation metrics and a CLI.
"""

__version__ = "0.1.0"

from .geometry import CameraIntrinsics, RigidTransform, default_intrinsics
from .radar import (NoRadarReturnsError, PixelObservation, RadarReturn,
                    accumulate_frames, filter_by_snr, project_to_image,
                    radar_mean_depth, rasterize)

__all__ = [
    "CameraIntrinsics",
    "NoRadarReturnsError",
    "PixelObservation",
    "RadarReturn",
    "RigidTransform",
    "accumulate_frames",
    "default_intrinsics",
    "filter_by_snr",
    "project_to_image",
    "radar_mean_depth",
    "rasterize",
    "__version__",
]
