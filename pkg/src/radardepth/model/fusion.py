"""Combining the network's depth head with radar: weighted fusion and the
naive global rescaling baseline."""

from dataclasses import dataclass

import numpy as np

from ..radar import NoRadarReturnsError, radar_mean_depth


@dataclass
class FusionOutput:
    """Per-pixel depth head d0, fusion weight w in (0,1), and the fused depth."""

    d0: np.ndarray
    w: np.ndarray
    fused: np.ndarray = None


def fuse_with_mean(d0, w, radar_mean):
    """Per-pixel blend d0 * w + (1 - w) * radar_mean.

    Works on NumPy arrays and torch tensors alike; radar_mean broadcasts.
    """
    if d0.shape != w.shape:
        raise ValueError(f"d0 shape {d0.shape} != w shape {w.shape}")
    return d0 * w + (1.0 - w) * radar_mean


def fuse(d0, w, observations):
    """Blend the depth head with the mean radar depth using the weight map.

    With no observations the radar anchor is undefined and the depth head is
    returned unchanged.
    """
    d0 = np.asarray(d0, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if d0.shape != w.shape:
        raise ValueError(f"d0 shape {d0.shape} != w shape {w.shape}")
    if not observations:
        return d0.copy()
    if np.any(w <= 0.0) or np.any(w >= 1.0):
        raise ValueError("weight map must lie strictly inside (0, 1)")
    return fuse_with_mean(d0, w, radar_mean_depth(observations))


def naive_scale(relative_depth, observations):
    """Rescale a relative depth map by the mean radar/prediction ratio.

    The scale is the mean over observations of radar depth divided by the
    relative prediction at the observation's rounded pixel.
    """
    relative_depth = np.asarray(relative_depth, dtype=np.float64)
    if not observations:
        raise NoRadarReturnsError("naive rescaling needs at least one radar observation")
    ratios = []
    for obs in observations:
        v = int(np.rint(obs.v))
        u = int(np.rint(obs.u))
        rel = relative_depth[v, u]
        if rel == 0.0:
            raise ValueError(f"relative depth is zero at observation pixel ({u}, {v})")
        ratios.append(obs.depth / rel)
    scale = float(np.mean(ratios))
    return scale * relative_depth
