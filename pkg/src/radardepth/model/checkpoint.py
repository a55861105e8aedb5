"""Checkpoints: a flat npz parameter archive with an embedded JSON manifest."""

import json
from dataclasses import asdict

import numpy as np
import torch

from .config import ModelConfig
from .network import FusionDepthNet, param_group_names

MANIFEST_KEY = "__manifest__"
PARAM_PREFIX = "param."


def save_checkpoint(path, model: FusionDepthNet, extra=None):
    pretrained, new = param_group_names(model)
    manifest = {
        "model_config": asdict(model.config),
        "param_groups": {"pretrained": pretrained, "new": new},
        "extra": extra or {},
    }
    arrays = {
        PARAM_PREFIX + name: p.detach().cpu().numpy()
        for name, p in model.named_parameters()
    }
    arrays[MANIFEST_KEY] = np.array(json.dumps(manifest, sort_keys=True))
    np.savez(path, **arrays)


def load_checkpoint(path):
    """Rebuild the model from a checkpoint; returns (model, manifest)."""
    with np.load(path) as archive:
        manifest = json.loads(str(archive[MANIFEST_KEY]))
        cfg = manifest["model_config"]
        cfg["image_size"] = tuple(cfg["image_size"])
        config = ModelConfig(**cfg)
        model = FusionDepthNet(config)
        state = {
            key[len(PARAM_PREFIX):]: torch.from_numpy(archive[key])
            for key in archive.files if key.startswith(PARAM_PREFIX)
        }
    model.load_state_dict(state)
    model.eval()
    return model, manifest
