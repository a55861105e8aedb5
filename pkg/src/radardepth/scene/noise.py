"""Periodic value noise for procedural terrain and albedo textures."""

import numpy as np


def _fade(t):
    # quintic smoothstep, keeps octave boundaries C2-smooth
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def periodic_value_noise(shape, lattice_n, rng):
    """Single octave of value noise on a periodic lattice, evaluated on a grid.

    The output tiles seamlessly: row/column 0 continues past the last
    row/column. Values are in [0, 1].
    """
    h, w = shape
    lattice = rng.random((lattice_n, lattice_n))
    gy = np.arange(h) * (lattice_n / h)
    gx = np.arange(w) * (lattice_n / w)
    iy = np.floor(gy).astype(np.int64)
    ix = np.floor(gx).astype(np.int64)
    fy = _fade(gy - iy)[:, None]
    fx = _fade(gx - ix)[None, :]
    iy0 = np.mod(iy, lattice_n)
    ix0 = np.mod(ix, lattice_n)
    iy1 = np.mod(iy0 + 1, lattice_n)
    ix1 = np.mod(ix0 + 1, lattice_n)
    v00 = lattice[np.ix_(iy0, ix0)]
    v01 = lattice[np.ix_(iy0, ix1)]
    v10 = lattice[np.ix_(iy1, ix0)]
    v11 = lattice[np.ix_(iy1, ix1)]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    return top * (1.0 - fy) + bot * fy


def octave_noise(shape, rng, octaves=4, base_lattice=4, persistence=0.5):
    """Sum of value-noise octaves, normalized to [0, 1]."""
    total = np.zeros(shape, dtype=np.float64)
    amp = 1.0
    lattice_n = base_lattice
    for _ in range(octaves):
        total += amp * periodic_value_noise(shape, lattice_n, rng)
        amp *= persistence
        lattice_n = min(lattice_n * 2, min(shape))
    lo, hi = total.min(), total.max()
    if hi - lo < 1e-12:
        return np.zeros(shape, dtype=np.float64)
    return (total - lo) / (hi - lo)
