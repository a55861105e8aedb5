# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled heightfield ray-march kernel.

Ray-for-ray identical arithmetic to the pure-Python fallback in
_raycast_py.py: Lipschitz-bounded adaptive stepping with a dt floor and
fixed-iteration bisection refinement. Keep the two in lockstep.
"""

import numpy as np

from libc.math cimport fabs, floor, hypot, INFINITY

DEF BISECT_ITERS = 36


cdef inline double _height(const double[:, ::1] hf, Py_ssize_t rows, Py_ssize_t cols,
                           double inv_cell, double x, double y) noexcept nogil:
    cdef double gx = x * inv_cell
    cdef double gy = y * inv_cell
    cdef double fx0 = floor(gx)
    cdef double fy0 = floor(gy)
    cdef double fx = gx - fx0
    cdef double fy = gy - fy0
    cdef Py_ssize_t ix0 = <Py_ssize_t> fx0
    cdef Py_ssize_t iy0 = <Py_ssize_t> fy0
    # branchy wrap beats integer modulo; coordinates stay within a few periods
    while ix0 >= cols:
        ix0 -= cols
    while ix0 < 0:
        ix0 += cols
    while iy0 >= rows:
        iy0 -= rows
    while iy0 < 0:
        iy0 += rows
    cdef Py_ssize_t ix1 = ix0 + 1
    cdef Py_ssize_t iy1 = iy0 + 1
    if ix1 == cols:
        ix1 = 0
    if iy1 == rows:
        iy1 = 0
    cdef double top = hf[iy0, ix0] * (1.0 - fx) + hf[iy0, ix1] * fx
    cdef double bot = hf[iy1, ix0] * (1.0 - fx) + hf[iy1, ix1] * fx
    return top * (1.0 - fy) + bot * fy


cdef inline double _clearance(const double[:, ::1] hf, Py_ssize_t rows, Py_ssize_t cols,
                              double inv_cell, double ox, double oy, double oz,
                              double dx, double dy, double dz, double t) noexcept nogil:
    return (oz + t * dz) - _height(hf, rows, cols, inv_cell, ox + t * dx, oy + t * dy)


cdef inline double _bisect(const double[:, ::1] hf, Py_ssize_t rows, Py_ssize_t cols,
                           double inv_cell, double ox, double oy, double oz,
                           double dx, double dy, double dz,
                           double lo, double hi) noexcept nogil:
    cdef double mid
    cdef int i
    for i in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if _clearance(hf, rows, cols, inv_cell, ox, oy, oz, dx, dy, dz, mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def raycast_heightfield(heightfield, double cell, origin, dirs, double t_max,
                        double slope_bound, double hit_tol=1e-9, double dt_min=1e-2,
                        long max_iters=0):
    """March N rays against a periodic heightfield; misses return inf."""
    cdef const double[:, ::1] hf = np.ascontiguousarray(heightfield, dtype=np.float64)
    cdef const double[::1] o = np.asarray(origin, dtype=np.float64)
    cdef const double[:, ::1] d = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double inv_cell = 1.0 / cell
    if max_iters <= 0:
        max_iters = <long> (t_max / dt_min) + 1000

    cdef Py_ssize_t rows = hf.shape[0]
    cdef Py_ssize_t cols = hf.shape[1]
    cdef double ox = o[0], oy = o[1], oz = o[2]
    cdef double dx, dy, dz, g, t, f, dt, t_new, f_new
    cdef Py_ssize_t i
    cdef long it
    cdef bint resolved

    with nogil:
        for i in range(n):
            dx = d[i, 0]
            dy = d[i, 1]
            dz = d[i, 2]
            g = fabs(dz) + slope_bound * hypot(dx, dy)
            if g < 1e-30:
                g = 1e-30
            t = 0.0
            f = _clearance(hf, rows, cols, inv_cell, ox, oy, oz, dx, dy, dz, t)
            if f <= hit_tol:
                out[i] = 0.0
                continue
            resolved = False
            for it in range(max_iters):
                dt = f / g
                if dt < dt_min:
                    dt = dt_min
                t_new = t + dt
                if t_new > t_max:
                    out[i] = INFINITY
                    resolved = True
                    break
                f_new = _clearance(hf, rows, cols, inv_cell, ox, oy, oz, dx, dy, dz, t_new)
                if f_new < 0.0:
                    out[i] = _bisect(hf, rows, cols, inv_cell, ox, oy, oz, dx, dy, dz, t, t_new)
                    resolved = True
                    break
                if f_new <= hit_tol:
                    out[i] = t_new
                    resolved = True
                    break
                t = t_new
                f = f_new
            if not resolved:
                out[i] = INFINITY
    return out_arr
