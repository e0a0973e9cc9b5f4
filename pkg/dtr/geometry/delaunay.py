import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, QhullError

from dtr.errors import ConfigError
from dtr.geometry.predicates import EPS_GEOM, circumcenter_xy, circumcenters, signed_areas

BACKENDS = ("qhull", "bowyer_watson")


@dataclass(frozen=True)
class Triangulation:
    r"""
    Delaunay triangulation of a planar point set.

    Args:
        points (`np.ndarray`): (N, 2) deduplicated input points.
        triangles (`np.ndarray`): (M, 3) counter-clockwise vertex indices into `points`.
        circumcenters (`np.ndarray`): (M, 2) circumcenter of each triangle.
        source_index (`np.ndarray`): (N,) index of each point in the caller's input.
    """

    points: np.ndarray
    triangles: np.ndarray
    circumcenters: np.ndarray
    source_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self):
        return len(self.triangles)

    @property
    def empty(self):
        return len(self.triangles) == 0


def dedup_points(points, eps: float = EPS_GEOM):
    """Merge points closer than `eps`; the first occurrence in input order survives."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    assert np.isfinite(pts).all(), "points must be finite"
    if len(pts) == 0:
        return pts, np.zeros(0, dtype=np.int64)
    keys = np.round(pts / eps).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    keep = np.sort(first)
    return pts[keep], keep


def _has_cocircular_pair(points, tris, eps: float) -> bool:
    cc = circumcenters(points, tris)
    radius = np.linalg.norm(points[tris[:, 0]] - cc, axis=1)
    edges = tris[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    opposite = tris[:, [2, 0, 1]].reshape(-1)
    owner = np.repeat(np.arange(len(tris)), 3)
    n = len(points)
    keys = edges[:, 0] * n + edges[:, 1]
    order = np.argsort(keys)
    twin = edges[:, 1] * n + edges[:, 0]
    pos = np.minimum(np.searchsorted(keys[order], twin), len(keys) - 1)
    shared = keys[order][pos] == twin
    partner = order[pos]
    gap = np.linalg.norm(points[opposite[partner]] - cc[owner], axis=1) - radius[owner]
    return bool(np.any(shared & (np.abs(gap) <= eps)))


def _settle_cocircular(points, tris, eps: float = EPS_GEOM):
    """
    Where two triangles share an edge and their four vertices are cocircular
    within `eps`, keep the diagonal whose triangle pair has the lower sorted
    index tuples. Rows come in and go out counter-clockwise.
    """
    if len(tris) < 2 or not _has_cocircular_pair(points, tris, eps):
        return tris
    tris = [tuple(int(v) for v in t) for t in tris]
    owner = {}

    def attach(k):
        a, b, c = tris[k]
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            owner[(u, v)] = (k, w)

    def detach(k):
        a, b, c = tris[k]
        for u, v in ((a, b), (b, c), (c, a)):
            del owner[(u, v)]

    for k in range(len(tris)):
        attach(k)
    pending = [e for e in owner if e[0] < e[1] and e[::-1] in owner]
    budget = len(tris) * len(tris)
    while pending and budget > 0:
        u, v = pending.pop()
        if (u, v) not in owner or (v, u) not in owner:
            continue
        (k, w), (j, z) = owner[(u, v)], owner[(v, u)]
        center = circumcenter_xy(points[u], points[v], points[w])
        radius = math.hypot(*(points[u] - center))
        if abs(math.hypot(*(points[z] - center)) - radius) > eps:
            continue
        # quad u, z, v, w is convex and counter-clockwise
        current = sorted([tuple(sorted(tris[k])), tuple(sorted(tris[j]))])
        swapped = sorted([tuple(sorted((u, z, w))), tuple(sorted((z, v, w)))])
        if swapped >= current:
            continue
        detach(k)
        detach(j)
        tris[k], tris[j] = (u, z, w), (z, v, w)
        attach(k)
        attach(j)
        pending += [tuple(sorted(e)) for e in ((u, z), (z, v), (v, w), (w, u))]
        budget -= 1
    return np.asarray(tris, dtype=np.int64).reshape(-1, 3)


def _canonical(points, triangles):
    """CCW orientation, zero-area triangles dropped, cocircular ties settled, rows rotated and sorted."""
    if len(triangles) == 0:
        return np.zeros((0, 3), dtype=np.int64)
    tris = np.asarray(triangles, dtype=np.int64).copy()
    area = signed_areas(points, tris)
    cw = area < 0
    tris[cw] = tris[cw][:, [0, 2, 1]]
    a = points[tris[:, 0]]
    longest = np.max(
        [
            np.linalg.norm(points[tris[:, 1]] - a, axis=1),
            np.linalg.norm(points[tris[:, 2]] - a, axis=1),
            np.linalg.norm(points[tris[:, 2]] - points[tris[:, 1]], axis=1),
        ],
        axis=0,
    )
    tris = _settle_cocircular(points, tris[2.0 * np.abs(area) > EPS_GEOM * longest])
    # rotate each row so its smallest index leads; rotation keeps CCW
    shift = np.argmin(tris, axis=1)
    idx = (np.arange(3)[None, :] + shift[:, None]) % 3
    tris = np.take_along_axis(tris, idx, axis=1)
    order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))
    return tris[order]


def _qhull(points):
    try:
        out = Delaunay(points, qhull_options="Qbb Qc Qz Q12")
    except (QhullError, ValueError) as e:
        logging.debug(f"qhull rejected {len(points)} points: {e}")
        return np.zeros((0, 3), dtype=np.int64)
    return out.simplices


def _bowyer_watson(points):
    """Incremental insertion into a super-triangle; O(n^2), kept for reference runs."""
    n = len(points)
    lo, hi = points.min(axis=0), points.max(axis=0)
    center = 0.5 * (lo + hi)
    span = max(float(np.max(hi - lo)), 1.0) * 1e3
    verts = np.vstack(
        [
            points,
            center + [-2.0 * span, -span],
            center + [2.0 * span, -span],
            center + [0.0, 2.0 * span],
        ]
    )
    tris = {}

    def add(a, b, c):
        cc = circumcenters(verts, np.array([[a, b, c]]))[0]
        r2 = float(((verts[a] - cc) ** 2).sum())
        tris[(a, b, c)] = (cc, r2)

    add(n, n + 1, n + 2)
    for i in range(n):
        p = verts[i]
        bad = []
        for key, (cc, r2) in tris.items():
            r = np.sqrt(r2)
            if np.linalg.norm(p - cc) < r - EPS_GEOM:
                bad.append(key)
        if not bad:
            logging.debug(f"point {i} lies on every candidate circumcircle, skipped")
            continue
        edges = {}
        for a, b, c in bad:
            for e in ((a, b), (b, c), (c, a)):
                key = tuple(sorted(e))
                edges[key] = None if key in edges else e
            del tris[(a, b, c)]
        for e in edges.values():
            if e is None:
                continue
            a, b = e
            if abs(signed_areas(verts, np.array([[a, b, i]]))[0]) > 0.0:
                add(a, b, i)
    out = [k for k in tris if max(k) < n]
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def delaunay_triangulate(points, backend: str = "qhull") -> Triangulation:
    """
    Delaunay triangulation of `points` (sequence of (x, y)).

    Fewer than three non-collinear points produce an empty triangulation;
    identical input yields identical output.
    """
    if backend not in BACKENDS:
        raise ConfigError(f"unknown triangulation backend {backend!r}, valid: {BACKENDS}")
    pts, source = dedup_points(points)
    tris = np.zeros((0, 3), dtype=np.int64)
    if len(pts) >= 3:
        raw = _qhull(pts) if backend == "qhull" else _bowyer_watson(pts)
        tris = _canonical(pts, raw)
    return Triangulation(
        points=pts,
        triangles=tris,
        circumcenters=circumcenters(pts, tris),
        source_index=source,
    )
