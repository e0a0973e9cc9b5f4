import json
import logging
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Tuple

import numpy as np
from matplotlib.path import Path as MplPath

from dtr.errors import TrackFormatError

TRACK_FIELDS = ("name", "outer", "inner", "obstacles", "start_pose", "finish_line", "trap_regions")
TRACK_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(__file__))), "tracks")


def closed_segments(polyline: np.ndarray) -> np.ndarray:
    """(N, 2, 2) segments of an implicitly closed polyline."""
    if len(polyline) < 2:
        return np.zeros((0, 2, 2))
    return np.stack([polyline, np.roll(polyline, -1, axis=0)], axis=1)


def _segments_cross(s1, s2):
    def orient(a, b, c):
        return np.sign((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))

    a, b = s1[:, None, 0], s1[:, None, 1]
    c, d = s2[None, :, 0], s2[None, :, 1]
    return (orient(a, b, c) * orient(a, b, d) < 0) & (orient(c, d, a) * orient(c, d, b) < 0)


def self_intersects(polyline: np.ndarray) -> bool:
    segs = closed_segments(polyline)
    cross = _segments_cross(segs, segs)
    # neighbours share an endpoint and never cross properly
    return bool(np.triu(cross, k=2).any())


@dataclass(frozen=True)
class TrackDefinition:
    r"""
    Simulated world: closed boundaries, dead-end branches and timing line.

    Args:
        name (`str`): track name.
        outer (`np.ndarray`): (N, 2) outer boundary, implicitly closed.
        inner (`np.ndarray`): (M, 2) inner boundary, may be empty for open corridors.
        obstacles (`List[np.ndarray]`): closed solid polygons inside the drivable area.
        start_pose (`Tuple[float, float, float]`): x, y, theta.
        finish_line (`np.ndarray`): (2, 2) endpoints a, b; forward crossing moves to the right of a->b.
        trap_regions (`List[np.ndarray]`): closed polygons used only for counting trap entries.
    """

    name: str
    outer: np.ndarray
    inner: np.ndarray
    obstacles: List[np.ndarray] = field(default_factory=list)
    start_pose: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    finish_line: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    trap_regions: List[np.ndarray] = field(default_factory=list)

    @cached_property
    def segments(self) -> np.ndarray:
        """Every physical wall segment: outer, inner and obstacles."""
        parts = [closed_segments(self.outer), closed_segments(self.inner)]
        parts += [closed_segments(o) for o in self.obstacles]
        return np.concatenate(parts, axis=0)

    @cached_property
    def _outer_path(self):
        return MplPath(self.outer)

    @cached_property
    def _holes(self):
        holes = [self.inner] if len(self.inner) >= 3 else []
        return [MplPath(h) for h in holes + list(self.obstacles)]

    @cached_property
    def _traps(self):
        return [MplPath(t) for t in self.trap_regions]

    def in_drivable(self, xy) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(xy, dtype=np.float64))
        ok = self._outer_path.contains_points(pts)
        for hole in self._holes:
            ok &= ~hole.contains_points(pts)
        return ok

    def in_trap(self, xy) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(xy, dtype=np.float64))
        hit = np.zeros(len(pts), dtype=bool)
        for trap in self._traps:
            hit |= trap.contains_points(pts)
        return hit

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        xs, ys = self.outer[:, 0], self.outer[:, 1]
        return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())


def _polyline(field_name, value, allow_empty=False) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise TrackFormatError(field_name, "expected an array of [x, y] pairs") from None
    if arr.size == 0 and allow_empty:
        return np.zeros((0, 2))
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
        raise TrackFormatError(field_name, "expected at least three [x, y] pairs")
    if not np.isfinite(arr).all():
        raise TrackFormatError(field_name, "coordinates must be finite")
    if self_intersects(arr):
        raise TrackFormatError(field_name, "polyline intersects itself")
    return arr


def parse_track(doc: dict) -> TrackDefinition:
    if not isinstance(doc, dict):
        raise TrackFormatError("<root>", "expected a JSON object")
    for key in doc:
        if key not in TRACK_FIELDS:
            raise TrackFormatError(key, "unknown field")
    for key in ("name", "outer", "inner", "start_pose", "finish_line"):
        if key not in doc:
            raise TrackFormatError(key, "missing field")
    if not isinstance(doc["name"], str):
        raise TrackFormatError("name", "expected a string")

    outer = _polyline("outer", doc["outer"])
    inner = _polyline("inner", doc["inner"], allow_empty=True)
    obstacles = [_polyline(f"obstacles[{i}]", o) for i, o in enumerate(doc.get("obstacles", []))]
    traps = [_polyline(f"trap_regions[{i}]", t) for i, t in enumerate(doc.get("trap_regions", []))]

    pose = doc["start_pose"]
    try:
        start_pose = (float(pose["x"]), float(pose["y"]), float(pose["theta"]))
    except (TypeError, KeyError, ValueError):
        raise TrackFormatError("start_pose", 'expected {"x", "y", "theta"}') from None
    line = doc["finish_line"]
    try:
        finish = np.asarray([line["a"], line["b"]], dtype=np.float64).reshape(2, 2)
    except (TypeError, KeyError, ValueError):
        raise TrackFormatError("finish_line", 'expected {"a": [x, y], "b": [x, y]}') from None

    track = TrackDefinition(
        name=doc["name"],
        outer=outer,
        inner=inner,
        obstacles=obstacles,
        start_pose=start_pose,
        finish_line=finish,
        trap_regions=traps,
    )
    if len(inner) and not MplPath(outer).contains_points(inner).all():
        raise TrackFormatError("inner", "inner boundary is not inside the outer boundary")
    if not all(math.isfinite(v) for v in start_pose) or not track.in_drivable(start_pose[:2])[0]:
        raise TrackFormatError("start_pose", "start pose is outside the drivable region")
    return track


def load_track(path) -> TrackDefinition:
    """Load a track JSON file; a bare name such as `oval` resolves to the shipped tracks."""
    if not os.path.exists(path) and not str(path).endswith(".json"):
        path = os.path.join(TRACK_DIR, f"{path}.json")
    with open(path, "r") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise TrackFormatError("<root>", f"invalid JSON ({e})") from None
    track = parse_track(doc)
    logging.info(f"loaded track {track.name} with {len(track.segments)} wall segments")
    return track
