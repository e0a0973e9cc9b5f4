import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline
from scipy.signal import savgol_filter

from dtr.errors import ConfigError, DegeneratePathError
from dtr.geometry import Triangulation, triangles_metrics
from dtr.pipelines.scan import LidarScan

# per-triangle condition labels reported by filter_triangles
SHAPE, AREA, NONE = "shape", "area", "none"


@dataclass(frozen=True)
class TriangleFilterParams:
    isosceles_tolerance: float = 0.2
    pointedness_min: float = 2.0
    area_min: float = 0.5 * 2.2**2
    require_two_classes: bool = True

    def __post_init__(self):
        if self.isosceles_tolerance < 0 or self.pointedness_min < 1 or self.area_min < 0:
            raise ConfigError(f"invalid triangle filter parameters {self}")


@dataclass(frozen=True)
class OrderingParams:
    max_step: float = 1.5
    backward_tolerance: float = 0.2

    def __post_init__(self):
        if self.max_step <= 0 or self.backward_tolerance < 0:
            raise ConfigError(f"invalid ordering parameters {self}")


@dataclass(frozen=True)
class CenterlinePath:
    r"""
    Resampled racing line in the vehicle frame.

    Args:
        points (`np.ndarray`): (K, 2) samples at uniform arc-length spacing.
        curvature (`np.ndarray`): (K,) unsigned curvature in 1/m.
        arc_length (`np.ndarray`): (K,) arc length from the first sample, strictly increasing.
        signed_curvature (`np.ndarray`): (K,) curvature with left turns positive.
    """

    points: np.ndarray
    curvature: np.ndarray
    arc_length: np.ndarray
    signed_curvature: np.ndarray

    def __len__(self):
        return len(self.points)

    @property
    def length(self) -> float:
        return float(self.arc_length[-1]) if len(self.arc_length) else 0.0


@dataclass(frozen=True)
class FilterReport:
    retained: np.ndarray
    condition: np.ndarray
    two_class_veto: np.ndarray


def filter_report(
    tri: Triangulation, labels, p: TriangleFilterParams
) -> FilterReport:
    """
    Evaluate the shape, area and two-class rules on every triangle.

    `labels` holds one segment id per triangulation point.
    """
    sides, area = triangles_metrics(tri.points, tri.triangles)
    if len(sides) == 0:
        empty = np.zeros(0, dtype=bool)
        return FilterReport(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=object), empty)
    s_min, s_mid, s_max = sides[:, 0], sides[:, 1], sides[:, 2]
    isosceles = s_max <= s_mid * (1.0 + p.isosceles_tolerance)
    pointed = s_max >= s_min * p.pointedness_min
    shape = isosceles & pointed
    large = area >= p.area_min
    keep = shape | large

    condition = np.full(len(sides), NONE, dtype=object)
    condition[large] = AREA
    condition[shape] = SHAPE

    veto = np.zeros(len(sides), dtype=bool)
    if p.require_two_classes:
        labels = np.asarray(labels)
        assert len(labels) == len(tri.points), "one label per triangulation point"
        tl = labels[tri.triangles]
        single = (tl[:, 0] == tl[:, 1]) & (tl[:, 1] == tl[:, 2])
        veto = keep & single
        keep = keep & ~single
    return FilterReport(np.flatnonzero(keep), condition, veto)


def filter_triangles(tri: Triangulation, labels, p: TriangleFilterParams) -> np.ndarray:
    """Indices of the triangles that are likely to span the track width."""
    return filter_report(tri, labels, p).retained


def candidate_mask(
    centers: np.ndarray, scan: LidarScan, margin_free: float = 0.15
) -> np.ndarray:
    """
    True for points ahead of the car (x > 0) and inside observed free space:
    closer than the nearest beam's range minus `margin_free`.
    """
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    if len(centers) == 0:
        return np.zeros(0, dtype=bool)
    bearing = np.arctan2(centers[:, 1], centers[:, 0])
    half = 0.5 * scan.angle_increment
    in_fov = (bearing >= scan.angle_min - half) & (bearing <= scan.angle_max + half)
    beam = np.rint((bearing - scan.angle_min) / scan.angle_increment).astype(np.int64)
    beam = np.clip(beam, 0, len(scan.ranges) - 1)
    free = np.hypot(centers[:, 0], centers[:, 1]) < scan.ranges[beam] - margin_free
    return (centers[:, 0] > 0.0) & in_fov & free


def candidate_circumcenters(
    tri: Triangulation, retained, scan: LidarScan, margin_free: float = 0.15
) -> np.ndarray:
    centers = tri.circumcenters[np.asarray(retained, dtype=np.int64)]
    return centers[candidate_mask(centers, scan, margin_free)]


def order_greedy(candidates, p: OrderingParams) -> np.ndarray:
    """
    Chain circumcenters by greedy nearest neighbour starting from the one
    closest to the car; steps longer than `max_step` or pointing further back
    than `backward_tolerance` along the current direction are refused.
    """
    pts = np.asarray(candidates, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    visited = np.zeros(len(pts), dtype=bool)
    current = int(np.argmin(np.hypot(pts[:, 0], pts[:, 1])))
    direction = np.array([1.0, 0.0])
    chain = [current]
    visited[current] = True
    while not visited.all():
        disp = pts - pts[current]
        dist = np.hypot(disp[:, 0], disp[:, 1])
        ok = (~visited) & (dist <= p.max_step) & (disp @ direction >= -p.backward_tolerance)
        if not ok.any():
            break
        nxt = int(np.argmin(np.where(ok, dist, np.inf)))
        if dist[nxt] > 1e-9:
            direction = disp[nxt] / dist[nxt]
        visited[nxt] = True
        chain.append(nxt)
        current = nxt
    return pts[chain]


def smooth_savitzky_golay(points, window: int, order: int) -> np.ndarray:
    """Per-coordinate Savitzky-Golay smoothing; inputs shorter than the window pass through."""
    if window % 2 != 1 or window < 1:
        raise ConfigError(f"Savitzky-Golay window must be odd, got {window}")
    if order >= window or order < 0:
        raise ConfigError(f"Savitzky-Golay order {order} must be below window {window}")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < window:
        return pts.copy()
    return savgol_filter(pts, window, order, axis=0, mode="interp")


def thin_waypoints(points, min_spacing: float) -> np.ndarray:
    """Drop waypoints closer than `min_spacing` to the previously kept one; the last point is kept."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) <= 2:
        return pts.copy()
    kept = [pts[0]]
    for q in pts[1:-1]:
        if math.dist(q, kept[-1]) >= min_spacing:
            kept.append(q)
    if len(kept) > 1 and math.dist(pts[-1], kept[-1]) < min_spacing:
        kept[-1] = pts[-1]
    else:
        kept.append(pts[-1])
    return np.asarray(kept)


def _distinct(pts, eps=1e-9):
    keep = np.concatenate([[True], np.linalg.norm(np.diff(pts, axis=0), axis=1) > eps])
    return pts[keep]


def arc_stations(length: float, ds: float) -> np.ndarray:
    """
    Stations 0, ds, 2ds, ... along a path of the given length. The endpoint is
    kept only when the last gap is at least 0.95 ds, or when it is the only
    other station.
    """
    k = int(np.floor(length / ds + 1e-9))
    s = ds * np.arange(k + 1)
    rest = length - s[-1]
    if k == 0 or rest >= 0.95 * ds:
        s = np.append(s, length) if rest > 1e-9 * ds else s
    return s


def fit_spline_resample(points, ds: float) -> CenterlinePath:
    """
    Fit a natural cubic parametric spline over chord length and resample it at
    uniform arc-length spacing, with analytic curvature at every sample.
    """
    assert ds > 0, "ds must be positive"
    pts = _distinct(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    if len(pts) < 2:
        raise DegeneratePathError("path needs at least two distinct points")

    if len(pts) == 2:
        length = float(np.linalg.norm(pts[1] - pts[0]))
        s = arc_stations(length, ds)
        samples = pts[0] + (s / length)[:, None] * (pts[1] - pts[0])
        zeros = np.zeros(len(s))
        return CenterlinePath(samples, zeros, s, zeros.copy())

    u = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    spline = CubicSpline(u, pts, bc_type="natural", axis=0)

    # arc length table on a dense parameter grid
    u_dense = np.linspace(0.0, u[-1], max(400, 20 * len(pts)))
    speed = np.linalg.norm(spline(u_dense, 1), axis=1)
    s_dense = cumulative_trapezoid(speed, u_dense, initial=0.0)
    s = arc_stations(float(s_dense[-1]), ds)
    u_s = np.interp(s, s_dense, u_dense)

    d1 = spline(u_s, 1)
    d2 = spline(u_s, 2)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    norm = np.maximum((d1**2).sum(axis=1), 1e-18) ** 1.5
    signed = cross / norm
    return CenterlinePath(spline(u_s), np.abs(signed), s, signed)
