import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from easydict import EasyDict

from dtr.geometry import ray_segments_intersect
from dtr.pipelines import LidarScan
from dtr.sim.track import TrackDefinition
from dtr.sim.vehicle import VehicleState


@dataclass(frozen=True)
class LidarSpec:
    r"""
    Beam layout of the simulated sensor, symmetric about the heading.

    Args:
        num_beams (`int`): number of beams.
        fov (`float`): field of view in radians.
        range_max (`float`): maximum range in meters; misses report this value.
        noise_std (`float`): standard deviation of Gaussian range noise in meters.
    """

    num_beams: int = 1080
    fov: float = math.radians(270.0)
    range_max: float = 10.0
    noise_std: float = 0.0

    @classmethod
    def from_config(cls, cfg: EasyDict) -> "LidarSpec":
        return cls(
            num_beams=int(cfg.lidar.num_beams),
            fov=float(cfg.lidar.fov),
            range_max=float(cfg.lidar.range_max),
            noise_std=float(cfg.lidar.noise_std),
        )

    @property
    def angle_min(self) -> float:
        return -0.5 * self.fov

    @property
    def angle_increment(self) -> float:
        return self.fov / (self.num_beams - 1)


def simulate_lidar(
    s: VehicleState,
    track: TrackDefinition,
    spec: LidarSpec,
    rng: Optional[np.random.Generator] = None,
) -> LidarScan:
    """Cast every beam against all walls; misses and hits past range_max report range_max."""
    angles = spec.angle_min + np.arange(spec.num_beams) * spec.angle_increment
    world = s.theta + angles
    directions = np.stack([np.cos(world), np.sin(world)], axis=-1)
    ranges = ray_segments_intersect((s.x, s.y), directions, track.segments)
    hit = ranges < spec.range_max
    if spec.noise_std > 0 and rng is not None:
        noisy = ranges + rng.normal(0.0, spec.noise_std, size=spec.num_beams)
        ranges = np.where(hit, np.clip(noisy, 1e-3, spec.range_max), ranges)
    # a beam starting on a wall still reports a positive range
    ranges = np.clip(ranges, 1e-3, spec.range_max)
    return LidarScan(
        angle_min=spec.angle_min,
        angle_increment=spec.angle_increment,
        ranges=ranges,
        range_max=spec.range_max,
    )
