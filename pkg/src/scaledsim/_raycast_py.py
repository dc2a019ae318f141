"""Pure-Python raycast kernel, import-time fallback for the compiled one.

Arithmetic mirrors _raycast_c expression by expression so both backends
produce bit-identical ranges.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def _nearest(ox: float, oy: float, dx: float, dy: float, segs) -> float:
    best = math.inf
    for x1, y1, x2, y2 in segs:
        ex = x2 - x1
        ey = y2 - y1
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


def cast_ray(ox: float, oy: float, bearing: float, segs: np.ndarray) -> float:
    """Distance from (ox, oy) along bearing to the nearest segment, inf on miss."""
    return _nearest(ox, oy, math.cos(bearing), math.sin(bearing), segs.tolist())


def cast_rays(ox: float, oy: float, yaw: float, n_rays: int,
              segs: np.ndarray) -> np.ndarray:
    """Full scan: ray k at bearing yaw + k*(2*pi/n_rays), CCW."""
    seg_list = segs.tolist()
    step = 2.0 * math.pi / n_rays
    out = np.empty(n_rays, dtype=np.float64)
    for k in range(n_rays):
        bearing = yaw + k * step
        out[k] = _nearest(ox, oy, math.cos(bearing), math.sin(bearing), seg_list)
    return out
