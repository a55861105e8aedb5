from .checkpoint import load_checkpoint, save_checkpoint
from .config import PRESETS, ModelConfig, preset_config
from .fusion import FusionOutput, fuse, fuse_with_mean, naive_scale
from .network import (FusionDepthNet, build_model, extend_from_stub,
                      extend_patch_embedding, param_groups, zero_radar_embedding)

__all__ = [
    "PRESETS",
    "FusionDepthNet",
    "FusionOutput",
    "ModelConfig",
    "build_model",
    "extend_from_stub",
    "extend_patch_embedding",
    "fuse",
    "fuse_with_mean",
    "load_checkpoint",
    "naive_scale",
    "param_groups",
    "preset_config",
    "save_checkpoint",
    "zero_radar_embedding",
]
