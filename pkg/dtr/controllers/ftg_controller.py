from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from easydict import EasyDict

from dtr.controllers.dtr_controller import ControlCommand
from dtr.errors import ConfigError, NoGapError
from dtr.pipelines import LidarScan


@dataclass(frozen=True)
class FtgParams:
    bubble_radius: float = 0.3
    gap_range_threshold: float = 1.5
    # (|steer| bound in rad, speed in m/s), bounds increasing, speeds non-increasing
    steer_speed_table: Tuple[Tuple[float, float], ...] = field(
        default=((0.1, 4.0), (0.2, 2.5), (0.4, 1.5))
    )
    max_steer: float = 0.4
    v_min: float = 0.5

    def __post_init__(self):
        table = tuple((float(b), float(s)) for b, s in self.steer_speed_table)
        object.__setattr__(self, "steer_speed_table", table)
        bounds = [b for b, _ in table]
        speeds = [s for _, s in table]
        if (
            not table
            or any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:]))
            or any(s <= 0 for s in speeds)
            or any(s2 > s1 for s1, s2 in zip(speeds, speeds[1:]))
        ):
            raise ConfigError(f"invalid steer/speed table {table}")

    @classmethod
    def from_config(cls, cfg: EasyDict) -> "FtgParams":
        return cls(
            bubble_radius=cfg.ftg.bubble_radius,
            gap_range_threshold=cfg.ftg.gap_range_threshold,
            steer_speed_table=cfg.ftg.steer_speed_table,
            max_steer=cfg.vehicle.max_steer,
            v_min=cfg.vehicle.v_min,
        )


def apply_bubble(ranges, angles, bubble_radius: float) -> np.ndarray:
    """Zero every beam whose endpoint lies within `bubble_radius` of the closest return."""
    r = np.asarray(ranges, dtype=np.float64).copy()
    measured = np.isfinite(r) & (r > 0)
    if bubble_radius <= 0 or not measured.any():
        return r
    closest = int(np.argmin(np.where(measured, r, np.inf)))
    xs, ys = r * np.cos(angles), r * np.sin(angles)
    dist = np.hypot(xs - xs[closest], ys - ys[closest])
    r[measured & (dist < bubble_radius)] = 0.0
    return r


def find_largest_gap(ranges, threshold: float) -> Tuple[int, int]:
    """
    Longest maximal run of beams with range above `threshold` as inclusive
    (start, end) indices; ties go to the lower start index.
    """
    r = np.asarray(ranges, dtype=np.float64)
    assert len(r) > 0, "empty range list"
    open_ = np.concatenate([[False], r > threshold, [False]])
    edges = np.flatnonzero(np.diff(open_.astype(np.int8)))
    if len(edges) == 0:
        raise NoGapError(f"no beam exceeds {threshold} m")
    starts, ends = edges[0::2], edges[1::2] - 1
    best = int(np.argmax(ends - starts))
    return int(starts[best]), int(ends[best])


def ftg_step(scan: LidarScan, p: FtgParams) -> ControlCommand:
    """Steer toward the furthest beam of the largest gap; speed from the steering table."""
    angles = scan.angles
    ranges = apply_bubble(scan.ranges, angles, p.bubble_radius)
    try:
        start, end = find_largest_gap(ranges, p.gap_range_threshold)
    except NoGapError:
        return ControlCommand(0.0, p.v_min)

    gap = ranges[start : end + 1]
    # equal-range beams (no-return plateaus) are aimed at their mean bearing
    furthest = np.flatnonzero(gap == gap.max()) + start
    bearing = float(np.mean(angles[furthest]))
    steer = min(max(bearing, -p.max_steer), p.max_steer)

    speed = p.steer_speed_table[-1][1]
    for bound, table_speed in p.steer_speed_table:
        if bound > abs(steer):
            speed = table_speed
            break
    return ControlCommand(steer, speed)


class FTGController:
    def __init__(self, cfg: EasyDict):
        self.params = FtgParams.from_config(cfg)

    def reset(self):
        pass

    def __call__(self, scan: LidarScan) -> ControlCommand:
        return ftg_step(scan, self.params)
