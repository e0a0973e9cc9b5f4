import math
from typing import NamedTuple

from dtr.controllers import ControlCommand


class VehicleState(NamedTuple):
    # world frame
    x: float
    y: float
    theta: float
    v: float = 0.0


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def kinematic_step(s: VehicleState, cmd: ControlCommand, dt: float, wheelbase: float) -> VehicleState:
    """
    Kinematic bicycle, rear-axle reference. The controller already rate-limits
    speed, so the commanded speed is applied directly.
    """
    assert dt > 0, "dt must be positive"
    v = max(float(cmd.speed), 0.0)
    x = s.x + v * math.cos(s.theta) * dt
    y = s.y + v * math.sin(s.theta) * dt
    theta = wrap_angle(s.theta + (v / wheelbase) * math.tan(cmd.steer) * dt)
    return VehicleState(x, y, theta, v)
