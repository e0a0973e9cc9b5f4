import json
import math

import numpy as np
import pytest

from dtr.controllers import ControlCommand, build_controller
from dtr.errors import TrackFormatError
from dtr.geometry import point_segments_distance
from dtr.sim import (
    COLLISION,
    CONTROLLER_ERROR,
    LAPS,
    TIMEOUT,
    LidarSpec,
    VehicleState,
    check_collision,
    kinematic_step,
    lap_crossing,
    load_track,
    parse_track,
    run_episode,
    simulate_lidar,
    wrap_angle,
)
from dtr.utils.eval_utils import mean_std

from conftest import ConstantController, corridor_doc


def test_lidar_in_corridor(corridor_track):
    spec = LidarSpec(num_beams=5, fov=math.pi, range_max=10.0)
    scan = simulate_lidar(VehicleState(0.0, 0.0, 0.0), corridor_track, spec)
    np.testing.assert_allclose(scan.ranges, [1.0, math.sqrt(2.0), 10.0, math.sqrt(2.0), 1.0])
    assert scan.angle_min == pytest.approx(-math.pi / 2)


def test_lidar_follows_the_heading(corridor_track):
    spec = LidarSpec(num_beams=3, fov=math.pi / 2, range_max=10.0)
    scan = simulate_lidar(VehicleState(0.0, 0.0, math.pi / 2), corridor_track, spec)
    # straight ahead is now the left wall
    assert scan.ranges[1] == pytest.approx(1.0)


def test_lidar_noise_is_seeded(corridor_track):
    spec = LidarSpec(num_beams=64, fov=math.pi, range_max=10.0, noise_std=0.02)
    s = VehicleState(0.0, 0.0, 0.0)
    a = simulate_lidar(s, corridor_track, spec, np.random.default_rng(1))
    b = simulate_lidar(s, corridor_track, spec, np.random.default_rng(1))
    clean = simulate_lidar(s, corridor_track, LidarSpec(num_beams=64, fov=math.pi, range_max=10.0))
    np.testing.assert_array_equal(a.ranges, b.ranges)
    assert not np.array_equal(a.ranges, clean.ranges)
    # no-return beams stay at range_max
    assert (a.ranges[clean.ranges == 10.0] == 10.0).all()


def test_kinematic_step():
    s = kinematic_step(VehicleState(0.0, 0.0, 0.0), ControlCommand(0.0, 2.0), 0.1, 0.33)
    assert (s.x, s.y, s.theta, s.v) == pytest.approx((0.2, 0.0, 0.0, 2.0))
    s = kinematic_step(VehicleState(0.0, 0.0, 0.0), ControlCommand(0.3, 1.0), 0.1, 0.33)
    assert s.theta == pytest.approx(math.tan(0.3) / 0.33 * 0.1)
    s = kinematic_step(VehicleState(1.0, 1.0, 0.0), ControlCommand(0.0, -1.0), 0.1, 0.33)
    assert (s.x, s.v) == (1.0, 0.0)


@pytest.mark.parametrize("steer", [0.1, 0.3, -0.4])
def test_turning_radius_follows_the_steering_angle(steer):
    wheelbase, dt = 0.33, 1e-3
    s = VehicleState(0.0, 0.0, 0.0)
    path = []
    for _ in range(4000):
        s = kinematic_step(s, ControlCommand(steer, 1.0), dt, wheelbase)
        path.append((s.x, s.y))
    path = np.asarray(path)
    # algebraic circle fit: x^2 + y^2 + D x + E y + F = 0
    A = np.column_stack([path, np.ones(len(path))])
    D, E, F = np.linalg.lstsq(A, -(path**2).sum(axis=1), rcond=None)[0]
    center = np.array([-D / 2, -E / 2])
    radius = math.sqrt(center @ center - F)
    assert radius == pytest.approx(wheelbase / math.tan(abs(steer)), rel=0.01)
    dist = np.linalg.norm(path - center, axis=1)
    assert np.ptp(dist) < 0.01 * radius
    # the center lies on the side the wheels point to
    assert math.copysign(1.0, center[1]) == math.copysign(1.0, steer)


def test_lidar_hits_lie_on_walls():
    rng = np.random.default_rng(4)
    spec = LidarSpec()
    for name in ("oval", "trap", "gp", "corridor"):
        track = load_track(name)
        x0, y0, x1, y1 = track.bounds
        checked = 0
        while checked < 10:
            xy = rng.uniform([x0, y0], [x1, y1])
            if not track.in_drivable(xy)[0]:
                continue
            pose = VehicleState(xy[0], xy[1], rng.uniform(-math.pi, math.pi))
            scan = simulate_lidar(pose, track, spec)
            bearings = pose.theta + scan.angle_min + scan.angle_increment * np.arange(len(scan.ranges))
            for r, b in zip(scan.ranges, bearings):
                if r < scan.range_max:
                    hit = (pose.x + r * math.cos(b), pose.y + r * math.sin(b))
                    assert point_segments_distance(hit, track.segments).min() < 1e-6
            checked += 1


def test_wrap_angle():
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.5) == 0.5


def test_check_collision(corridor_track):
    assert not check_collision(VehicleState(0.0, 0.0, 0.0), corridor_track, 0.15)
    assert check_collision(VehicleState(0.0, 0.9, 0.0), corridor_track, 0.15)
    assert not check_collision(VehicleState(0.0, 0.85, 0.0), corridor_track, 0.15)


def test_lap_crossing():
    finish = ((2.0, -1.0), (2.0, 1.0))
    before, after = VehicleState(1.9, 0.0, 0.0), VehicleState(2.1, 0.0, 0.0)
    assert lap_crossing(before, after, finish)
    assert not lap_crossing(after, before, finish)
    assert not lap_crossing(before, VehicleState(1.95, 0.0, 0.0), finish)
    # passing beside the line
    assert not lap_crossing(VehicleState(1.9, 3.0, 0.0), VehicleState(2.1, 3.0, 0.0), finish)


def test_parse_track_errors():
    doc = corridor_doc()
    doc["color"] = "red"
    with pytest.raises(TrackFormatError) as e:
        parse_track(doc)
    assert e.value.field == "color"

    doc = corridor_doc()
    del doc["finish_line"]
    with pytest.raises(TrackFormatError, match="finish_line"):
        parse_track(doc)

    doc = corridor_doc(start_pose={"x": 0.0, "y": 5.0, "theta": 0.0})
    with pytest.raises(TrackFormatError, match="start_pose"):
        parse_track(doc)

    doc = corridor_doc(outer=[[0, 0], [2, 2], [2, 0], [0, 2]])
    with pytest.raises(TrackFormatError, match="outer"):
        parse_track(doc)

    doc = corridor_doc(inner=[[200, 0], [201, 0], [201, 1]])
    with pytest.raises(TrackFormatError, match="inner"):
        parse_track(doc)


def test_load_track_from_file(tmp_path):
    path = tmp_path / "mini.json"
    path.write_text(json.dumps(corridor_doc()))
    track = load_track(str(path))
    assert track.name == "test_corridor"
    assert len(track.segments) == 4

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(TrackFormatError):
        load_track(str(bad))


def test_shipped_tracks_are_valid(shipped_track):
    assert shipped_track.in_drivable(shipped_track.start_pose[:2])[0]
    x0, y0, x1, y1 = shipped_track.bounds
    assert x1 > x0 and y1 > y0
    if shipped_track.name == "trap":
        assert len(shipped_track.trap_regions) == 2
    if len(shipped_track.inner):
        # circuits start just behind the line so the out-lap is short
        assert 0.0 < shipped_track.finish_line[0, 0] - shipped_track.start_pose[0] <= 1.5


def test_constant_controller_in_corridor(corridor_track, cfg):
    cfg.sim.max_time = 2.0
    result = run_episode(ConstantController(0.0, 1.0), corridor_track, cfg, lap_target=1)
    assert result.termination == TIMEOUT
    assert result.collisions == 0
    assert len(result.times) == 81
    np.testing.assert_allclose(result.states[:, 0], result.times, atol=1e-9)
    np.testing.assert_allclose(result.states[:, 1], 0.0)
    assert len(result.cycle_latencies) == 80
    assert result.partial_time == pytest.approx(2.0)


def test_lap_timing_and_additivity(cfg):
    cfg.sim.flying_start = False
    track = parse_track(corridor_doc(finish_x=2.0))
    result = run_episode(ConstantController(0.0, 1.0), track, cfg, lap_target=1)
    assert result.termination == LAPS
    assert result.lap_times[0] == pytest.approx(2.0, abs=cfg.control.dt)
    assert sum(result.lap_times) + result.partial_time == pytest.approx(result.total_time)
    assert all(t > 0 for t in result.lap_times)
    assert result.out_lap_time is None


def test_flying_laps_skip_the_out_lap(cfg):
    # constant steer drives a circle of radius 2 through a line 0.5 m ahead of the start
    square = [[-5.0, -5.0], [5.0, -5.0], [5.0, 5.0], [-5.0, 5.0]]
    track = parse_track(corridor_doc(finish_x=0.5, half_width=0.5, outer=square))
    steer, speed = math.atan(cfg.vehicle.wheelbase / 2.0), 2.0
    result = run_episode(ConstantController(steer, speed), track, cfg, lap_target=2)
    assert result.termination == LAPS
    assert result.out_lap_time == pytest.approx(0.25, abs=cfg.control.dt)
    period = 2.0 * math.pi * 2.0 / speed
    np.testing.assert_allclose(result.lap_times, period, atol=2 * cfg.control.dt)
    assert sum(result.lap_times) + result.partial_time == pytest.approx(result.total_time)
    assert result.partial_time == pytest.approx(result.out_lap_time)


def test_collision_stops_the_episode(corridor_track, cfg):
    result = run_episode(ConstantController(0.4, 2.0), corridor_track, cfg, lap_target=1)
    assert result.termination == COLLISION
    assert result.collisions == 1
    assert result.first_collision_time == pytest.approx(result.total_time)


def test_controller_error_is_reported(corridor_track, cfg):
    def broken(scan):
        raise RuntimeError("boom")

    result = run_episode(broken, corridor_track, cfg, lap_target=1)
    assert result.termination == CONTROLLER_ERROR
    assert "boom" in result.error
    assert len(result.times) == 1


def test_trap_entries_are_counted(cfg):
    trap = [[[-1.0, -1.0], [3.0, -1.0], [3.0, 1.0], [-1.0, 1.0]]]
    track = parse_track(corridor_doc(trap_regions=trap))
    cfg.sim.max_time = 1.0
    result = run_episode(ConstantController(0.0, 1.0), track, cfg, lap_target=1)
    assert result.trap_entries == len(result.times)


def test_episodes_are_deterministic(cfg):
    cfg.sim.max_time = 3.0
    cfg.lidar.noise_std = 0.01
    track = load_track("oval")
    a = run_episode(build_controller("ftg", cfg), track, cfg, lap_target=1, seed=4)
    b = run_episode(build_controller("ftg", cfg), track, cfg, lap_target=1, seed=4)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.commands, b.commands)
    assert a.lap_times == b.lap_times


@pytest.mark.slow
def test_dtr_laps_the_oval(cfg):
    result = run_episode(build_controller("dtr", cfg), load_track("oval"), cfg, lap_target=5)
    assert result.termination == LAPS
    assert len(result.lap_times) == 5
    assert result.collisions == 0


@pytest.mark.slow
def test_dtr_avoids_the_trap(cfg):
    result = run_episode(build_controller("dtr", cfg), load_track("trap"), cfg, lap_target=5)
    assert result.collisions == 0
    assert result.trap_entries == 0
    assert len(result.lap_times) == 5


@pytest.mark.slow
def test_ftg_falls_into_the_trap(cfg):
    result = run_episode(build_controller("ftg", cfg), load_track("trap"), cfg, lap_target=5)
    assert result.trap_entries > 0


@pytest.mark.slow
def test_dtr_is_faster_than_ftg_on_gp(cfg):
    track = load_track("gp")
    dtr = run_episode(build_controller("dtr", cfg), track, cfg, lap_target=5)
    ftg = run_episode(build_controller("ftg", cfg), track, cfg, lap_target=5)
    assert dtr.collisions == 0 and len(dtr.lap_times) == 5
    assert ftg.collisions == 0 and len(ftg.lap_times) == 5
    dtr_mean, dtr_std = mean_std(dtr.lap_times)
    ftg_mean, _ = mean_std(ftg.lap_times)
    assert dtr_mean <= 0.8 * ftg_mean
    assert dtr_std <= 0.05 * dtr_mean
