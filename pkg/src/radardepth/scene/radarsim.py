"""Synthetic radar observations: sample a few corner features and read their
ground-truth depth, mimicking what a sparse radar would return."""

import numpy as np

from ..radar import PixelObservation

K_RANGE = (1, 5)  # number of returns per frame matches what the sensor produces


def synthesize_radar(corners, depth, rng_seed, k_min=K_RANGE[0], k_max=K_RANGE[1]):
    """Pick k corners (k uniform in [k_min, k_max], clamped to availability)
    without replacement; each becomes an observation whose depth is the
    ground-truth depth at its pixel. Deterministic given the seed."""
    if not corners:
        raise ValueError("no corners to sample radar returns from")
    if not (1 <= k_min <= k_max):
        raise ValueError(f"need 1 <= k_min <= k_max, got [{k_min}, {k_max}]")
    depth = np.asarray(depth)
    rng = np.random.default_rng(rng_seed)
    k = int(rng.integers(k_min, k_max + 1))
    k = min(k, len(corners))
    chosen = rng.choice(len(corners), size=k, replace=False)
    observations = []
    for idx in chosen:
        c = corners[int(idx)]
        d = float(depth[int(np.rint(c.v)), int(np.rint(c.u))])
        observations.append(PixelObservation(u=float(c.u), v=float(c.v), depth=d))
    return observations
