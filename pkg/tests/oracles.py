"""Independent oracle implementations used to freeze expected values.

Each oracle deliberately uses a different method than the code under test:
ray hits come from a linear solve instead of the cross-product kernel, the
circle fit is algebraic least squares, collisions use the closed-form 1-D
momentum balance.
"""
import math

import numpy as np


def ray_segment_hit(origin, bearing, seg):
    """Solve [d, a-b] [t, u]^T = a - o with numpy; return t or None."""
    ox, oy = origin
    ax, ay, bx, by = seg
    d = np.array([math.cos(bearing), math.sin(bearing)])
    m = np.column_stack([d, [ax - bx, ay - by]])
    rhs = np.array([ax - ox, ay - oy])
    det = np.linalg.det(m)
    if abs(det) < 1e-14:
        return None
    t, u = np.linalg.solve(m, rhs)
    if t < -1e-12 or u < -1e-12 or u > 1 + 1e-12:
        return None
    return float(t)


def ray_scene_distance(origin, bearing, segs):
    hits = [ray_segment_hit(origin, bearing, seg) for seg in segs]
    hits = [h for h in hits if h is not None and h >= 0.0]
    return min(hits) if hits else math.inf


def fit_circle(points):
    """Algebraic (Kasa) circle fit; returns (cx, cy, radius)."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    a = np.column_stack([x, y, np.ones_like(x)])
    b = x * x + y * y
    (d, e, f), *_ = np.linalg.lstsq(a, b, rcond=None)
    cx, cy = d / 2.0, e / 2.0
    radius = math.sqrt(f + cx * cx + cy * cy)
    return cx, cy, radius


def inelastic_1d(m1, v1, m2, v2):
    """Common velocity after a perfectly inelastic 1-D collision."""
    return (m1 * v1 + m2 * v2) / (m1 + m2)


def rect_overlap_area(c1, c2):
    """Overlap area of two convex quads via Sutherland-Hodgman clipping."""
    def clip(subject, a, b):
        out = []
        if not subject:
            return out
        s = subject[-1]
        for e in subject:
            s_in = (b[0] - a[0]) * (s[1] - a[1]) - (b[1] - a[1]) * (s[0] - a[0]) >= 0
            e_in = (b[0] - a[0]) * (e[1] - a[1]) - (b[1] - a[1]) * (e[0] - a[0]) >= 0
            if e_in:
                if not s_in:
                    out.append(_intersect(s, e, a, b))
                out.append(e)
            elif s_in:
                out.append(_intersect(s, e, a, b))
            s = e
        return out

    def _intersect(p1, p2, a, b):
        x1, y1 = p1
        x2, y2 = p2
        x3, y3 = a
        x4, y4 = b
        den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4) or 1e-12
        px = ((x1 * y2 - y1 * x2) * (x3 - x4) - (x1 - x2) * (x3 * y4 - y3 * x4)) / den
        py = ((x1 * y2 - y1 * x2) * (y3 - y4) - (y1 - y2) * (x3 * y4 - y3 * x4)) / den
        return (px, py)

    poly = list(c1)
    for k in range(len(c2)):
        poly = clip(poly, c2[k], c2[(k + 1) % len(c2)])
        if not poly:
            return 0.0
    area = 0.0
    for k in range(len(poly)):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % len(poly)]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0
