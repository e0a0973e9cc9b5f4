import math

import numpy as np
import pytest

from dtr.pipelines import LidarScan
from dtr.sim import load_track, parse_track
from dtr.utils.config_utils import load_config


def corridor_ranges(angles, half_width=1.0, range_max=10.0):
    """Ranges seen from the axis of an endless corridor with walls y = +-half_width."""
    s = np.abs(np.sin(angles))
    with np.errstate(divide="ignore"):
        r = np.where(s > 1e-12, half_width / s, np.inf)
    return np.minimum(r, range_max)


def make_scan(ranges, fov=math.radians(270.0), range_max=10.0):
    ranges = np.asarray(ranges, dtype=np.float64)
    return LidarScan(
        angle_min=-0.5 * fov,
        angle_increment=fov / (len(ranges) - 1),
        ranges=ranges,
        range_max=range_max,
    )


@pytest.fixture
def cfg():
    return load_config()


@pytest.fixture
def corridor_scan():
    fov, n = math.radians(270.0), 1080
    angles = -0.5 * fov + np.arange(n) * fov / (n - 1)
    return make_scan(corridor_ranges(angles))


@pytest.fixture
def open_scan():
    # nothing within range
    return make_scan(np.full(1080, 10.0))


def corridor_doc(finish_x=90.0, length=100.0, half_width=1.0, **extra):
    doc = {
        "name": "test_corridor",
        "outer": [[-5.0, -half_width], [length, -half_width], [length, half_width], [-5.0, half_width]],
        "inner": [],
        "obstacles": [],
        "start_pose": {"x": 0.0, "y": 0.0, "theta": 0.0},
        "finish_line": {"a": [finish_x, -half_width - 0.2], "b": [finish_x, half_width + 0.2]},
        "trap_regions": [],
    }
    doc.update(extra)
    return doc


@pytest.fixture
def corridor_track():
    return parse_track(corridor_doc())


@pytest.fixture(params=["corridor", "oval", "trap", "gp"])
def shipped_track(request):
    return load_track(request.param)


class ConstantController:
    def __init__(self, steer=0.0, speed=1.0):
        self.steer, self.speed = steer, speed
        self.calls = 0

    def reset(self):
        self.calls = 0

    def __call__(self, scan):
        from dtr.controllers import ControlCommand

        self.calls += 1
        return ControlCommand(self.steer, self.speed)


def track_scans(count, seed=0, clearance=0.4):
    """Scans from random poses on the shipped circuits, at least `clearance` from every wall."""
    from dtr.geometry import point_segments_distance
    from dtr.sim import LidarSpec, VehicleState, simulate_lidar

    rng = np.random.default_rng(seed)
    tracks = [load_track(name) for name in ("oval", "trap", "gp")]
    spec = LidarSpec()
    scans = []
    while len(scans) < count:
        track = tracks[rng.integers(len(tracks))]
        x0, y0, x1, y1 = track.bounds
        xy = rng.uniform([x0, y0], [x1, y1])
        if not track.in_drivable(xy)[0] or point_segments_distance(xy, track.segments).min() < clearance:
            continue
        pose = VehicleState(xy[0], xy[1], rng.uniform(-math.pi, math.pi))
        scans.append(simulate_lidar(pose, track, spec))
    return scans
