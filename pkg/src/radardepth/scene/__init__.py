from .corners import CornerFeature, detect_corners
from .dataset import DepthDataset, generate_dataset
from .pose import CameraPose, PoseSamplingError, full_coverage, sample_pose
from .radarsim import synthesize_radar
from .raycast import BACKEND, raycast_heightfield
from .render import RenderCoverageError, render_depth_rgb
from .terrain import TerrainScene, height_at, make_scene

__all__ = [
    "BACKEND",
    "CameraPose",
    "CornerFeature",
    "DepthDataset",
    "PoseSamplingError",
    "RenderCoverageError",
    "TerrainScene",
    "detect_corners",
    "full_coverage",
    "generate_dataset",
    "height_at",
    "make_scene",
    "raycast_heightfield",
    "render_depth_rgb",
    "sample_pose",
    "synthesize_radar",
]
