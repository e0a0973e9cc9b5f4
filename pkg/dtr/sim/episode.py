import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import tqdm
from easydict import EasyDict

from dtr.controllers import ControlCommand
from dtr.geometry import point_segments_distance
from dtr.pipelines import LidarScan
from dtr.sim.lidar import LidarSpec, simulate_lidar
from dtr.sim.track import TrackDefinition
from dtr.sim.vehicle import VehicleState, kinematic_step

LAPS, COLLISION, TIMEOUT, CONTROLLER_ERROR = "laps", "collision", "timeout", "controller_error"


@dataclass
class EpisodeResult:
    r"""
    Everything recorded during one closed-loop run.

    Args:
        times (`np.ndarray`): (T,) timestamps of the recorded states.
        states (`np.ndarray`): (T, 4) x, y, theta, v.
        commands (`np.ndarray`): (T, 2) steer and speed command applied from each state; zeros on the last row.
        lap_times (`List[float]`): completed lap times in seconds.
        out_lap_time (`float`, *optional*): time of the crossing that started lap timing, when laps are flying.
        collisions (`int`): number of collisions (the episode stops at the first).
        first_collision_time (`float`, *optional*): time of the first collision.
        cycle_latencies (`List[float]`): controller wall-clock time per cycle in seconds.
        trap_entries (`int`): recorded states inside any trap region.
        termination (`str`): one of laps, collision, timeout, controller_error.
        error (`str`, *optional*): diagnostic when the controller raised.
    """

    times: np.ndarray
    states: np.ndarray
    commands: np.ndarray
    lap_times: List[float] = field(default_factory=list)
    out_lap_time: Optional[float] = None
    collisions: int = 0
    first_collision_time: Optional[float] = None
    cycle_latencies: List[float] = field(default_factory=list)
    trap_entries: int = 0
    termination: str = TIMEOUT
    error: Optional[str] = None

    @property
    def total_time(self) -> float:
        return float(self.times[-1])

    @property
    def partial_time(self) -> float:
        """Time driven outside completed laps: the out-lap plus whatever follows the last lap."""
        return self.total_time - float(sum(self.lap_times))


def check_collision(s: VehicleState, track: TrackDefinition, radius: float) -> bool:
    return bool(point_segments_distance((s.x, s.y), track.segments).min() < radius)


def _cross(ux, uy, vx, vy):
    return ux * vy - uy * vx


def lap_crossing(prev: VehicleState, nxt: VehicleState, finish) -> bool:
    """
    True iff the step prev -> nxt crosses the finish line a -> b moving from
    its left side to its right side.
    """
    (ax, ay), (bx, by) = finish
    ex, ey = bx - ax, by - ay
    d_prev = _cross(ex, ey, prev.x - ax, prev.y - ay)
    d_next = _cross(ex, ey, nxt.x - ax, nxt.y - ay)
    if not (d_prev > 0.0 and d_next <= 0.0):
        return False
    mx, my = nxt.x - prev.x, nxt.y - prev.y
    e_a = _cross(mx, my, ax - prev.x, ay - prev.y)
    e_b = _cross(mx, my, bx - prev.x, by - prev.y)
    return e_a * e_b <= 0.0


def run_episode(
    controller: Callable[[LidarScan], ControlCommand],
    track: TrackDefinition,
    cfg: EasyDict,
    lap_target: int = 5,
    seed: Optional[int] = None,
    progress: bool = False,
) -> EpisodeResult:
    """
    Closed loop: scan, timed controller call, plant step, collision and lap
    checks, until `lap_target` laps, a collision or `cfg.sim.max_time`.

    With `cfg.sim.flying_start` the first forward crossing only starts the
    clock, so every timed lap is a flying lap.
    """
    assert lap_target >= 1, "lap_target must be at least 1"
    dt = float(cfg.control.dt)
    spec = LidarSpec.from_config(cfg)
    rng = np.random.default_rng(seed) if spec.noise_std > 0 else None
    max_steps = int(round(cfg.sim.max_time / dt))

    if hasattr(controller, "reset"):
        controller.reset()
    state = VehicleState(*track.start_pose, 0.0)
    times, states, commands = [0.0], [tuple(state)], []
    lap_times, latencies = [], []
    last_crossing = None if cfg.sim.flying_start else 0.0
    out_lap = None
    termination, error = TIMEOUT, None
    collisions, first_collision = 0, None

    for k in tqdm.tqdm(range(max_steps), disable=not progress, desc=track.name):
        scan = simulate_lidar(state, track, spec, rng)
        start = time.perf_counter()
        try:
            cmd = controller(scan)
        except Exception as e:
            logging.warning(f"controller raised at t={k * dt:.3f}s: {e!r}")
            termination, error = CONTROLLER_ERROR, repr(e)
            break
        latencies.append(time.perf_counter() - start)

        nxt = kinematic_step(state, cmd, dt, cfg.vehicle.wheelbase)
        t = (k + 1) * dt
        commands.append((cmd.steer, cmd.speed))
        times.append(t)
        states.append(tuple(nxt))

        crossed = lap_crossing(state, nxt, track.finish_line)
        if crossed and last_crossing is None:
            out_lap = last_crossing = t
            logging.info(f"{track.name}: timing starts at {t:.3f}s")
        elif crossed and t - last_crossing >= cfg.sim.rearm_time:
            lap_times.append(t - last_crossing)
            logging.info(f"{track.name}: lap {len(lap_times)} in {lap_times[-1]:.3f}s")
            last_crossing = t
            if len(lap_times) >= lap_target:
                termination = LAPS
                break
        if check_collision(nxt, track, cfg.sim.collision_radius):
            collisions, first_collision = 1, t
            termination = COLLISION
            logging.info(f"{track.name}: collision at t={t:.3f}s ({nxt.x:.2f}, {nxt.y:.2f})")
            break
        state = nxt

    commands.append((0.0, 0.0))
    states = np.asarray(states, dtype=np.float64)
    trap_entries = int(track.in_trap(states[:, :2]).sum()) if track.trap_regions else 0
    logging.info(
        f"{track.name}: {termination} after {times[-1]:.3f}s, {len(lap_times)} laps, "
        f"{trap_entries} trap samples"
    )
    return EpisodeResult(
        times=np.asarray(times),
        states=states,
        commands=np.asarray(commands, dtype=np.float64),
        lap_times=lap_times,
        out_lap_time=out_lap,
        collisions=collisions,
        first_collision_time=first_collision,
        cycle_latencies=latencies,
        trap_entries=trap_entries,
        termination=termination,
        error=error,
    )
