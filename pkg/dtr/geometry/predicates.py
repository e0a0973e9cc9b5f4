import math
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from dtr.errors import DegenerateTriangleError

# absolute tolerance in meters for every predicate
EPS_GEOM = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


def _xy(p):
    return float(p[0]), float(p[1])


def orient2d(a, b, c, eps: float = EPS_GEOM) -> int:
    """
    Orientation of the triangle abc.

    Returns +1 for counter-clockwise, -1 for clockwise and 0 when the smallest
    altitude of the triangle is within `eps` (collinear).
    """
    ax, ay = _xy(a)
    bx, by = _xy(b)
    cx, cy = _xy(c)
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    scale = max(
        math.hypot(bx - ax, by - ay),
        math.hypot(cx - ax, cy - ay),
        math.hypot(cx - bx, cy - by),
    )
    # |det| / longest edge is the smallest altitude
    if scale == 0.0 or abs(det) <= eps * scale:
        return 0
    return 1 if det > 0 else -1


def _vertices(t, points):
    a, b, c = (int(i) for i in t)
    assert len({a, b, c}) == 3, f"triangle indices must be distinct, got {t}"
    return points[a], points[b], points[c]


def circumcenter_xy(a, b, c) -> Point2:
    if orient2d(a, b, c) == 0:
        raise DegenerateTriangleError(f"collinear vertices {a}, {b}, {c}")
    ax, ay = _xy(a)
    bx, by = _xy(b)
    cx, cy = _xy(c)
    # relative to a to keep the cancellation small
    bx, by, cx, cy = bx - ax, by - ay, cx - ax, cy - ay
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return Point2(ax + ux, ay + uy)


def circumcenter(t, points) -> Point2:
    return circumcenter_xy(*_vertices(t, points))


def in_circumcircle(t, points, p, eps: float = EPS_GEOM) -> bool:
    """
    True iff `p` lies strictly inside the circumcircle of triangle `t`.
    Points within `eps` of the circle are reported as not inside.
    """
    a, b, c = _vertices(t, points)
    center = circumcenter_xy(a, b, c)
    radius = math.hypot(a[0] - center.x, a[1] - center.y)
    px, py = _xy(p)
    return math.hypot(px - center.x, py - center.y) < radius - eps


def triangle_metrics(t, points) -> Tuple[Tuple[float, float, float], float]:
    """Sorted side lengths (s_min, s_mid, s_max) and the unsigned area."""
    a, b, c = _vertices(t, points)
    ax, ay = _xy(a)
    bx, by = _xy(b)
    cx, cy = _xy(c)
    sides = sorted(
        (
            math.hypot(bx - ax, by - ay),
            math.hypot(cx - bx, cy - by),
            math.hypot(ax - cx, ay - cy),
        )
    )
    area = 0.5 * abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    return (sides[0], sides[1], sides[2]), area


def _cross(ux, uy, vx, vy):
    return ux * vy - uy * vx


def ray_segment_intersect(origin, direction, seg) -> Optional[float]:
    """
    Distance along the ray `origin + t * direction` (t >= 0) to the segment
    `seg = (p, q)`, or None when the ray misses it.
    """
    ox, oy = _xy(origin)
    dx, dy = _xy(direction)
    assert abs(math.hypot(dx, dy) - 1.0) < 1e-6, "direction must be a unit vector"
    (px, py), (qx, qy) = _xy(seg[0]), _xy(seg[1])
    ex, ey = qx - px, qy - py
    wx, wy = px - ox, py - oy
    denom = _cross(dx, dy, ex, ey)

    if abs(denom) <= 1e-12:
        # parallel: only a collinear overlap can be hit
        if abs(_cross(wx, wy, dx, dy)) > EPS_GEOM:
            return None
        tp = wx * dx + wy * dy
        tq = (qx - ox) * dx + (qy - oy) * dy
        lo, hi = min(tp, tq), max(tp, tq)
        if hi < 0.0:
            return None
        return max(lo, 0.0)

    t = _cross(wx, wy, ex, ey) / denom
    s = _cross(wx, wy, dx, dy) / denom
    if t < 0.0 or s < -1e-12 or s > 1.0 + 1e-12:
        return None
    return t


# batch forms


def circumcenters(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """(M, 2) circumcenters for an (M, 3) index array; rows must be non-degenerate."""
    if len(triangles) == 0:
        return np.zeros((0, 2))
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]] - a
    c = points[triangles[:, 2]] - a
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    b2 = (b**2).sum(axis=1)
    c2 = (c**2).sum(axis=1)
    ux = (c[:, 1] * b2 - b[:, 1] * c2) / d
    uy = (b[:, 0] * c2 - c[:, 0] * b2) / d
    return a + np.stack([ux, uy], axis=-1)


def signed_areas(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]]
    c = points[triangles[:, 2]]
    return 0.5 * (
        (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
        - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    )


def triangles_metrics(points: np.ndarray, triangles: np.ndarray):
    """(M, 3) ascending side lengths and (M,) unsigned areas."""
    if len(triangles) == 0:
        return np.zeros((0, 3)), np.zeros(0)
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]]
    c = points[triangles[:, 2]]
    sides = np.stack(
        [
            np.linalg.norm(b - a, axis=1),
            np.linalg.norm(c - b, axis=1),
            np.linalg.norm(a - c, axis=1),
        ],
        axis=-1,
    )
    sides.sort(axis=1)
    return sides, np.abs(signed_areas(points, triangles))


def ray_segments_intersect(
    origin: Sequence[float], directions: np.ndarray, segments: np.ndarray
) -> np.ndarray:
    """
    Nearest hit distance per ray against a set of segments.

    Args:
        origin: (2,) common ray origin.
        directions: (B, 2) unit directions.
        segments: (S, 2, 2) segment endpoints.

    Returns:
        (B,) distances, `inf` where a ray hits nothing.
    """
    o = np.asarray(origin, dtype=np.float64)
    d = np.asarray(directions, dtype=np.float64)[:, None, :]
    p = segments[None, :, 0, :]
    e = (segments[:, 1, :] - segments[:, 0, :])[None]
    w = p - o
    denom = d[..., 0] * e[..., 1] - d[..., 1] * e[..., 0]
    parallel = np.abs(denom) <= 1e-12
    safe = np.where(parallel, 1.0, denom)
    t = (w[..., 0] * e[..., 1] - w[..., 1] * e[..., 0]) / safe
    s = (w[..., 0] * d[..., 1] - w[..., 1] * d[..., 0]) / safe
    hit = (~parallel) & (t >= 0.0) & (s >= -1e-12) & (s <= 1.0 + 1e-12)
    t = np.where(hit, t, np.inf)
    if t.shape[1] == 0:
        return np.full(d.shape[0], np.inf)
    return t.min(axis=1)


def point_segments_distance(point: Sequence[float], segments: np.ndarray) -> np.ndarray:
    """(S,) Euclidean distance from `point` to each segment."""
    q = np.asarray(point, dtype=np.float64)
    p = segments[:, 0, :]
    e = segments[:, 1, :] - p
    len2 = (e**2).sum(axis=1)
    u = np.where(len2 > 0, ((q - p) * e).sum(axis=1) / np.where(len2 > 0, len2, 1.0), 0.0)
    u = np.clip(u, 0.0, 1.0)
    closest = p + u[:, None] * e
    return np.linalg.norm(closest - q, axis=1)
