# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled raycast kernel: nearest ray/segment intersections for LIDAR scans.

Must stay arithmetically identical to _raycast_py (same expressions, same
order) so the two backends are interchangeable bit for bit.
"""
from libc.math cimport cos, sin, INFINITY, M_PI

import numpy as np

BACKEND = "c"


cdef double _nearest(double ox, double oy, double dx, double dy,
                     double[:, ::1] segs) noexcept nogil:
    cdef Py_ssize_t i, n = segs.shape[0]
    cdef double best = INFINITY
    cdef double x1, y1, ex, ey, denom, qx, qy, t, u
    for i in range(n):
        x1 = segs[i, 0]
        y1 = segs[i, 1]
        ex = segs[i, 2] - x1
        ey = segs[i, 3] - y1
        denom = dx * ey - dy * ex
        if denom == 0.0:
            continue
        qx = x1 - ox
        qy = y1 - oy
        t = (qx * ey - qy * ex) / denom
        if t < 0.0 or t >= best:
            continue
        u = (qx * dy - qy * dx) / denom
        if u < 0.0 or u > 1.0:
            continue
        best = t
    return best


def cast_ray(double ox, double oy, double bearing, double[:, ::1] segs):
    """Distance from (ox, oy) along bearing to the nearest segment, inf on miss."""
    return _nearest(ox, oy, cos(bearing), sin(bearing), segs)


def cast_rays(double ox, double oy, double yaw, int n_rays, double[:, ::1] segs):
    """Full scan: ray k at bearing yaw + k*(2*pi/n_rays), CCW."""
    out = np.empty(n_rays, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double step = 2.0 * M_PI / n_rays
    cdef double bearing
    cdef int k
    with nogil:
        for k in range(n_rays):
            bearing = yaw + k * step
            ov[k] = _nearest(ox, oy, cos(bearing), sin(bearing), segs)
    return out
