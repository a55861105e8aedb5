"""Minimum-eigenvalue (Shi-Tomasi) corner detection on rendered images.

Corners stand in for strong radar reflectors: radar cross-section tends to
peak at corner-like structure, so synthetic radar returns are drawn from the
strongest image corners.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

WINDOW = 5          # box filter side for the structure tensor
NMS_RADIUS = 7      # non-maximum suppression neighborhood radius (pixels)
SCORE_REL_THRESHOLD = 1e-6  # discard responses below this fraction of the max
DEFAULT_MAX_CORNERS = 50


@dataclass(frozen=True)
class CornerFeature:
    u: int
    v: int
    score: float

    def __post_init__(self):
        if self.score < 0:
            raise ValueError(f"score must be >= 0, got {self.score}")


def corner_response(gray: np.ndarray) -> np.ndarray:
    """Smallest structure-tensor eigenvalue per pixel (central differences,
    5x5 box window)."""
    gray = np.asarray(gray, dtype=np.float64)
    gy, gx = np.gradient(gray)
    sxx = ndimage.uniform_filter(gx * gx, size=WINDOW, mode="reflect")
    syy = ndimage.uniform_filter(gy * gy, size=WINDOW, mode="reflect")
    sxy = ndimage.uniform_filter(gx * gy, size=WINDOW, mode="reflect")
    half_trace = 0.5 * (sxx + syy)
    disc = np.sqrt(np.maximum(0.25 * (sxx - syy) ** 2 + sxy * sxy, 0.0))
    return np.maximum(half_trace - disc, 0.0)


def detect_corners(rgb: np.ndarray, max_count=DEFAULT_MAX_CORNERS):
    """Top corners by min-eigenvalue score, after non-maximum suppression.

    Returns at most max_count CornerFeature, score-descending; fewer (possibly
    none) if the image lacks corner structure.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.size == 0:
        raise ValueError("image must be nonempty")
    gray = rgb.mean(axis=2) if rgb.ndim == 3 else rgb

    response = corner_response(gray)
    peak = response.max()
    if peak <= 0.0:
        return []

    footprint = 2 * NMS_RADIUS + 1
    local_max = ndimage.maximum_filter(response, size=footprint, mode="constant", cval=0.0)
    keep = (response == local_max) & (response >= SCORE_REL_THRESHOLD * peak)
    vs, us = np.nonzero(keep)
    scores = response[vs, us]
    # stable ordering: score descending, then (v, u) for deterministic ties
    order = np.lexsort((us, vs, -scores))[:max_count]
    return [CornerFeature(u=int(us[i]), v=int(vs[i]), score=float(scores[i])) for i in order]
