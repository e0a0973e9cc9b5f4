import copy
import json
import math

from easydict import EasyDict

from dtr.errors import ConfigError

DEFAULTS = {
    "geometry": {
        "backend": "qhull",
    },
    "scan": {
        "cell": 0.10,
        "gap_threshold": 0.5,
    },
    "centerline": {
        "isosceles_tolerance": 0.2,
        "pointedness_min": 2.0,
        # None resolves to 0.5 * track_width ** 2
        "area_min": None,
        "track_width": 2.2,
        "require_two_classes": True,
        "margin_free": 0.15,
        "max_step": 1.5,
        "backward_tolerance": 0.2,
        "sg_window": 7,
        "sg_order": 3,
        "min_waypoint_spacing": 0.25,
        "ds": 0.1,
    },
    "control": {
        "k_la": 0.6,
        "la_min": 0.6,
        "la_max": 3.0,
        "preview": 4.0,
        "kappa_eps": 1e-3,
        "dt": 0.025,
        "n_hold": 5,
    },
    "vehicle": {
        "wheelbase": 0.33,
        "max_steer": 0.4,
        "mu": 0.8,
        "a_y_max": 6.0,
        "a_accel": 4.0,
        "a_decel": 8.0,
        "v_min": 0.5,
        "v_max": 6.0,
    },
    "ftg": {
        "bubble_radius": 0.3,
        "gap_range_threshold": 1.5,
        "steer_speed_table": [[0.1, 4.0], [0.2, 2.5], [0.4, 1.5]],
    },
    "lidar": {
        "num_beams": 1080,
        "fov": math.radians(270.0),
        "range_max": 10.0,
        "noise_std": 0.0,
    },
    "sim": {
        "max_time": 300.0,
        "collision_radius": 0.15,
        "rearm_time": 1.0,
        "flying_start": True,
    },
}


def default_config() -> EasyDict:
    return EasyDict(copy.deepcopy(DEFAULTS))


def _coerce(key, default, text):
    if isinstance(default, bool):
        low = text.strip().lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {text!r}")
    try:
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float) or default is None:
            return float(text)
        if isinstance(default, (list, dict)):
            value = json.loads(text)
            if not isinstance(value, type(default)):
                raise ValueError(f"expected {type(default).__name__}")
            return value
    except ValueError as e:
        raise ConfigError(f"{key}: cannot parse {text!r} ({e})") from None
    return text


def apply_overrides(cfg: EasyDict, overrides) -> EasyDict:
    """
    Apply `key=value` strings with dotted keys, e.g. `control.k_la=0.8`.
    Values take the type of the default they replace.
    """
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = cfg
        for part in parts[:-1]:
            if part not in node or not isinstance(node[part], dict):
                raise ConfigError(f"unknown config key {key!r}")
            node = node[part]
        leaf = parts[-1]
        if leaf not in node or isinstance(node[leaf], dict):
            raise ConfigError(f"unknown config key {key!r}")
        node[leaf] = _coerce(key, node[leaf], text)
    return cfg


def area_min(cfg: EasyDict) -> float:
    c = cfg.centerline
    return 0.5 * c.track_width**2 if c.area_min is None else float(c.area_min)


def validate_config(cfg: EasyDict) -> EasyDict:
    c, v, f = cfg.centerline, cfg.vehicle, cfg.ftg
    checks = [
        ("scan.cell", cfg.scan.cell > 0),
        ("scan.gap_threshold", cfg.scan.gap_threshold > 0),
        ("centerline.isosceles_tolerance", c.isosceles_tolerance >= 0),
        ("centerline.pointedness_min", c.pointedness_min >= 1),
        ("centerline.area_min", area_min(cfg) >= 0),
        ("centerline.max_step", c.max_step > 0),
        ("centerline.backward_tolerance", c.backward_tolerance >= 0),
        ("centerline.sg_window", c.sg_window % 2 == 1 and c.sg_order < c.sg_window),
        ("centerline.ds", c.ds > 0),
        ("control.dt", cfg.control.dt > 0),
        ("control.la_min", 0 < cfg.control.la_min <= cfg.control.la_max),
        ("vehicle.v_min", 0 < v.v_min <= v.v_max),
        ("vehicle.max_steer", 0 < v.max_steer < math.pi / 2),
        (
            "vehicle",
            all(v[k] > 0 for k in ("wheelbase", "mu", "a_y_max", "a_accel", "a_decel")),
        ),
        ("ftg.steer_speed_table", _valid_table(f.steer_speed_table)),
        ("lidar.num_beams", cfg.lidar.num_beams >= 2),
        ("sim.collision_radius", cfg.sim.collision_radius > 0),
    ]
    for key, ok in checks:
        if not ok:
            raise ConfigError(f"invalid value for {key}")
    return cfg


def _valid_table(table):
    if not table:
        return False
    bounds = [b for b, _ in table]
    speeds = [s for _, s in table]
    return (
        all(b2 > b1 for b1, b2 in zip(bounds, bounds[1:]))
        and all(s > 0 for s in speeds)
        and all(s2 <= s1 for s1, s2 in zip(speeds, speeds[1:]))
    )


def load_config(overrides=None) -> EasyDict:
    return validate_config(apply_overrides(default_config(), overrides))
