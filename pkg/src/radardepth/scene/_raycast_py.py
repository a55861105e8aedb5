"""Pure-NumPy heightfield ray march; reference implementation of the hot kernel.

Rays are marched with Lipschitz-bounded adaptive steps: each step advances by
clearance / G where G bounds how fast the clearance can shrink per unit of the
ray parameter, so the surface is never tunneled through. A dt floor keeps
progress going near tangencies; any resulting overshoot is resolved by fixed
bisection, which also makes plane intersections exact to double precision.

The compiled Cython kernel (_raycast.pyx) implements the identical arithmetic
ray-by-ray; both backends must stay in lockstep.
"""

import numpy as np

# A crossing can only occur on a dt_min floor step (Lipschitz steps never
# overshoot), so the bisection bracket is at most dt_min wide and 36 halvings
# reach ~1e-13 of a meter.
BISECT_ITERS = 36


def _clearance(heightfield, inv_cell, origin, dirs, t):
    """Height of the ray point above the (periodic, bilinear) surface at parameter t."""
    x = origin[0] + t * dirs[:, 0]
    y = origin[1] + t * dirs[:, 1]
    z = origin[2] + t * dirs[:, 2]
    rows, cols = heightfield.shape
    gx = x * inv_cell
    gy = y * inv_cell
    ix0 = np.floor(gx).astype(np.int64)
    iy0 = np.floor(gy).astype(np.int64)
    fx = gx - ix0
    fy = gy - iy0
    ix0 = np.mod(ix0, cols)
    iy0 = np.mod(iy0, rows)
    ix1 = np.mod(ix0 + 1, cols)
    iy1 = np.mod(iy0 + 1, rows)
    top = heightfield[iy0, ix0] * (1.0 - fx) + heightfield[iy0, ix1] * fx
    bot = heightfield[iy1, ix0] * (1.0 - fx) + heightfield[iy1, ix1] * fx
    return z - (top * (1.0 - fy) + bot * fy)


def raycast_heightfield(heightfield, cell, origin, dirs, t_max, slope_bound,
                        hit_tol=1e-9, dt_min=1e-2, max_iters=0):
    """March N rays against a periodic heightfield.

    dirs need not be normalized; the returned hit parameter t is in units of
    the given direction vectors. Misses return inf.
    """
    heightfield = np.ascontiguousarray(heightfield, dtype=np.float64)
    origin = np.asarray(origin, dtype=np.float64)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64)
    n = dirs.shape[0]
    inv_cell = 1.0 / cell
    if max_iters <= 0:
        max_iters = int(t_max / dt_min) + 1000

    g = np.abs(dirs[:, 2]) + slope_bound * np.hypot(dirs[:, 0], dirs[:, 1])
    g = np.maximum(g, 1e-30)

    t_hit = np.full(n, np.inf)
    t = np.zeros(n)
    f = _clearance(heightfield, inv_cell, origin, dirs, t)

    # starting on/below the surface counts as an immediate hit
    start_hit = f <= hit_tol
    t_hit[start_hit] = 0.0
    active = np.flatnonzero(~start_hit)

    for _ in range(max_iters):
        if active.size == 0:
            break
        dt = np.maximum(f[active] / g[active], dt_min)
        t_new = t[active] + dt
        overrun = t_new > t_max
        if np.any(overrun):
            active = active[~overrun]
            t_new = t_new[~overrun]
        if active.size == 0:
            break
        f_new = _clearance(heightfield, inv_cell, origin, dirs[active], t_new)

        crossed = f_new < 0.0
        if np.any(crossed):
            idx = active[crossed]
            t_hit[idx] = _bisect(heightfield, inv_cell, origin, dirs[idx],
                                 t[idx], t_new[crossed])
        grazed = (~crossed) & (f_new <= hit_tol)
        if np.any(grazed):
            t_hit[active[grazed]] = t_new[grazed]

        keep = (~crossed) & (~grazed)
        t[active[keep]] = t_new[keep]
        f[active[keep]] = f_new[keep]
        active = active[keep]

    return t_hit


def _bisect(heightfield, inv_cell, origin, dirs, lo, hi):
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        above = _clearance(heightfield, inv_cell, origin, dirs, mid) >= 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)
