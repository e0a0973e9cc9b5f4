import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Tuple

import numpy as np
from easydict import EasyDict

from dtr.errors import ConfigError, DegeneratePathError, EmptyPathError
from dtr.geometry import Point2
from dtr.pipelines import LidarScan, extract_centerline
from dtr.pipelines.centerline import CenterlinePath


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 0.33
    max_steer: float = 0.4
    mu: float = 0.8
    # underestimate of the maximum lateral acceleration
    a_y_max: float = 6.0
    a_accel: float = 4.0
    a_decel: float = 8.0
    v_min: float = 0.5
    v_max: float = 6.0

    def __post_init__(self):
        positive = (
            self.wheelbase,
            self.max_steer,
            self.mu,
            self.a_y_max,
            self.a_accel,
            self.a_decel,
            self.v_min,
            self.v_max,
        )
        if min(positive) <= 0 or self.v_min > self.v_max or self.max_steer >= math.pi / 2:
            raise ConfigError(f"invalid vehicle parameters {self}")

    @classmethod
    def from_config(cls, cfg: EasyDict) -> "VehicleParams":
        return cls(**{k: float(v) for k, v in cfg.vehicle.items()})


class ControlCommand(NamedTuple):
    # radians, positive steers left
    steer: float
    # m/s
    speed: float


@dataclass(frozen=True)
class ControllerState:
    previous_speed: float = 0.0
    held_path: Optional[CenterlinePath] = None
    hold_count: int = 0


def lookahead_point(
    path: CenterlinePath, v: float, k_la: float, la_min: float, la_max: float
) -> Point2:
    """First sample at least `clamp(k_la * v, la_min, la_max)` along the path, else the last one."""
    if path is None or len(path) == 0:
        raise EmptyPathError("lookahead on an empty path")
    l_d = min(max(k_la * v, la_min), la_max)
    i = int(np.searchsorted(path.arc_length, l_d, side="left"))
    i = min(i, len(path) - 1)
    return Point2(float(path.points[i, 0]), float(path.points[i, 1]))


def pure_pursuit_steer(target, wheelbase: float, max_steer: float) -> float:
    l_d = math.hypot(target[0], target[1])
    if l_d < 1e-9:
        raise DegeneratePathError("pure pursuit target coincides with the vehicle")
    alpha = math.atan2(target[1], target[0])
    steer = math.atan(2.0 * wheelbase * math.sin(alpha) / l_d)
    return min(max(steer, -max_steer), max_steer)


def admissible_speed(kappa: float, p: VehicleParams, kappa_eps: float = 1e-3) -> float:
    """v_adm = sqrt(mu * a_y_max / kappa), capped to [v_min, v_max]."""
    assert kappa >= 0, "curvature must be unsigned"
    if kappa <= kappa_eps:
        return p.v_max
    return min(max(math.sqrt(p.mu * p.a_y_max / kappa), p.v_min), p.v_max)


def target_speed(
    path: CenterlinePath, preview: float, p: VehicleParams, kappa_eps: float = 1e-3
) -> float:
    if path is None or len(path) == 0:
        raise EmptyPathError("target speed on an empty path")
    within = path.arc_length <= preview
    within[0] = True
    kappa = float(path.curvature[within].max())
    return admissible_speed(kappa, p, kappa_eps)


def limit_acceleration(previous: float, target: float, dt: float, p: VehicleParams) -> float:
    assert dt > 0, "dt must be positive"
    return min(max(target, previous - p.a_decel * dt), previous + p.a_accel * dt)


def dtr_step(
    scan: LidarScan, state: ControllerState, cfg: EasyDict
) -> Tuple[ControlCommand, ControllerState]:
    """One control cycle: centerline, pure pursuit, curvature speed, rate limit."""
    ctl = cfg.control
    p = VehicleParams.from_config(cfg)

    path = extract_centerline(scan, cfg)
    if path is not None:
        state = replace(state, held_path=path, hold_count=0)
    elif state.held_path is not None and state.hold_count < ctl.n_hold:
        path = state.held_path
        state = replace(state, hold_count=state.hold_count + 1)
        logging.debug(f"centerline lost, holding previous path ({state.hold_count}/{ctl.n_hold})")
    else:
        state = replace(state, held_path=None, hold_count=ctl.n_hold)

    steer, target = 0.0, p.v_min
    if path is not None:
        goal = lookahead_point(path, state.previous_speed, ctl.k_la, ctl.la_min, ctl.la_max)
        if math.hypot(goal.x, goal.y) > 1e-9:
            steer = pure_pursuit_steer(goal, p.wheelbase, p.max_steer)
        target = target_speed(path, ctl.preview, p, ctl.kappa_eps)

    speed = limit_acceleration(state.previous_speed, target, ctl.dt, p)
    return ControlCommand(steer, speed), replace(state, previous_speed=speed)


class DTRController:
    """Per-cycle callable `scan -> ControlCommand` that threads its own state."""

    def __init__(self, cfg: EasyDict):
        self.cfg = cfg
        self.state = ControllerState()

    def reset(self):
        self.state = ControllerState()

    def __call__(self, scan: LidarScan) -> ControlCommand:
        cmd, self.state = dtr_step(scan, self.state, self.cfg)
        return cmd
