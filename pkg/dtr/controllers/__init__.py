from dtr.errors import ConfigError

from .dtr_controller import (
    ControlCommand,
    ControllerState,
    DTRController,
    VehicleParams,
    dtr_step,
)
from .ftg_controller import FTGController, FtgParams, ftg_step

CONTROLLERS = {
    "dtr": DTRController,
    "ftg": FTGController,
}

__all__ = {
    "CONTROLLERS": CONTROLLERS,
    "ControlCommand": ControlCommand,
    "ControllerState": ControllerState,
    "DTRController": DTRController,
    "FTGController": FTGController,
    "FtgParams": FtgParams,
    "VehicleParams": VehicleParams,
    "dtr_step": dtr_step,
    "ftg_step": ftg_step,
}


def build_controller(controller_id, cfg):
    if controller_id not in CONTROLLERS:
        raise ConfigError(
            f"unknown controller {controller_id!r}, valid ids: {', '.join(CONTROLLERS)}"
        )
    return CONTROLLERS[controller_id](cfg)
