from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from dtr.geometry import Point2

UNASSIGNED = -1


@dataclass(frozen=True)
class LidarScan:
    r"""
    Polar range measurements in the vehicle frame (x forward, y left).

    Args:
        angle_min (`float`): bearing of beam 0 in radians.
        angle_increment (`float`): bearing step between beams in radians, > 0.
        ranges (`np.ndarray`): (N,) ranges in meters; no-return beams carry `range_max`.
        range_max (`float`): sensor range in meters.
    """

    angle_min: float
    angle_increment: float
    ranges: np.ndarray
    range_max: float

    def __post_init__(self):
        ranges = np.asarray(self.ranges, dtype=np.float64)
        object.__setattr__(self, "ranges", ranges)
        assert self.angle_increment > 0, "angle_increment must be positive"
        assert ranges.ndim == 1 and len(ranges) >= 2, "a scan needs at least two beams"
        finite = ranges[np.isfinite(ranges)]
        assert np.all((finite > 0) & (finite <= self.range_max)), "ranges outside (0, range_max]"

    def __len__(self):
        return len(self.ranges)

    @property
    def angles(self) -> np.ndarray:
        return self.angle_min + np.arange(len(self.ranges)) * self.angle_increment

    @property
    def angle_max(self) -> float:
        return self.angle_min + (len(self.ranges) - 1) * self.angle_increment

    def mirrored(self) -> "LidarScan":
        """The same scene reflected about the vehicle x-axis."""
        return LidarScan(
            angle_min=-self.angle_max,
            angle_increment=self.angle_increment,
            ranges=self.ranges[::-1].copy(),
            range_max=self.range_max,
        )


class ScanPoint(NamedTuple):
    position: Point2
    beam_index: int
    segment_id: int


@dataclass(frozen=True)
class ScanPoints:
    r"""
    Cartesian scan points kept as parallel arrays.

    Args:
        positions (`np.ndarray`): (N, 2) vehicle-frame coordinates.
        beam_index (`np.ndarray`): (N,) originating beam of each point.
        segment_id (`np.ndarray`): (N,) wall segment, `UNASSIGNED` before segmentation.
    """

    positions: np.ndarray
    beam_index: np.ndarray
    segment_id: np.ndarray = field(default=None)

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "beam_index", np.asarray(self.beam_index, dtype=np.int64))
        if self.segment_id is None:
            object.__setattr__(
                self, "segment_id", np.full(len(positions), UNASSIGNED, dtype=np.int64)
            )
        else:
            object.__setattr__(self, "segment_id", np.asarray(self.segment_id, dtype=np.int64))

    def __len__(self):
        return len(self.positions)

    def take(self, index) -> "ScanPoints":
        return ScanPoints(
            self.positions[index], self.beam_index[index], self.segment_id[index]
        )

    def __iter__(self):
        for (x, y), b, s in zip(self.positions, self.beam_index, self.segment_id):
            yield ScanPoint(Point2(float(x), float(y)), int(b), int(s))

    @classmethod
    def empty(cls) -> "ScanPoints":
        return cls(np.zeros((0, 2)), np.zeros(0, dtype=np.int64))


def scan_to_points(scan: LidarScan, eps: float = 1e-9) -> ScanPoints:
    """Polar to Cartesian; beams at range_max (no return) are dropped."""
    keep = np.isfinite(scan.ranges) & (scan.ranges < scan.range_max - eps)
    index = np.flatnonzero(keep)
    r = scan.ranges[index]
    theta = scan.angle_min + index * scan.angle_increment
    return ScanPoints(np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1), index)


def _cell_keys(positions: np.ndarray, cell: float):
    """
    Grid cell of every point and the cell center. Rows are mirrored about the
    x-axis: y in (0, cell) is row 1, (-cell, 0) is row -1, y == 0 is row 0.
    """
    kx = np.floor(positions[:, 0] / cell)
    ky = np.sign(positions[:, 1]) * (np.floor(np.abs(positions[:, 1]) / cell) + 1.0)
    center = np.stack([(kx + 0.5) * cell, np.sign(ky) * (np.abs(ky) - 0.5) * cell], axis=-1)
    return kx, ky, center


def subsample_boxed(points: ScanPoints, cell: float) -> ScanPoints:
    """
    Keep at most one point per grid cell of side `cell`: the one nearest the
    cell center. Ties go to the larger x, then the larger |y|, then beam order.
    The relative order of the kept points is preserved.
    """
    assert cell > 0, "cell must be positive"
    if len(points) == 0:
        return points
    pos = points.positions
    kx, ky, center = _cell_keys(pos, cell)
    dist = np.linalg.norm(pos - center, axis=1)
    order = np.lexsort((np.arange(len(pos)), -np.abs(pos[:, 1]), -pos[:, 0], dist, ky, kx))
    kx, ky = kx[order], ky[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = (kx[1:] != kx[:-1]) | (ky[1:] != ky[:-1])
    return points.take(np.sort(order[first]))


def segment_walls(points: ScanPoints, gap_threshold: float) -> ScanPoints:
    """Consecutive points farther apart than `gap_threshold` start a new segment."""
    assert gap_threshold > 0, "gap_threshold must be positive"
    if len(points) == 0:
        return points
    gaps = np.linalg.norm(np.diff(points.positions, axis=0), axis=1) > gap_threshold
    segment_id = np.concatenate([[0], np.cumsum(gaps)]).astype(np.int64)
    return ScanPoints(points.positions, points.beam_index, segment_id)
