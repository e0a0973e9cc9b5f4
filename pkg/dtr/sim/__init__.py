from dtr.sim.episode import (
    COLLISION,
    CONTROLLER_ERROR,
    LAPS,
    TIMEOUT,
    EpisodeResult,
    check_collision,
    lap_crossing,
    run_episode,
)
from dtr.sim.lidar import LidarSpec, simulate_lidar
from dtr.sim.track import TRACK_DIR, TrackDefinition, load_track, parse_track
from dtr.sim.vehicle import VehicleState, kinematic_step, wrap_angle

__all__ = {
    "COLLISION": COLLISION,
    "CONTROLLER_ERROR": CONTROLLER_ERROR,
    "LAPS": LAPS,
    "TIMEOUT": TIMEOUT,
    "EpisodeResult": EpisodeResult,
    "check_collision": check_collision,
    "lap_crossing": lap_crossing,
    "run_episode": run_episode,
    "LidarSpec": LidarSpec,
    "simulate_lidar": simulate_lidar,
    "TRACK_DIR": TRACK_DIR,
    "TrackDefinition": TrackDefinition,
    "load_track": load_track,
    "parse_track": parse_track,
    "VehicleState": VehicleState,
    "kinematic_step": kinematic_step,
    "wrap_angle": wrap_angle,
}
