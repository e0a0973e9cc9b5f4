import csv
import json
import logging
import os
import time

import numpy as np

FLOAT_FMT = "%.12g"


def make_run_dir(out_dir, tag):
    """`<out_dir>/<tag>_<timestamp>`, created on demand."""
    run_dir = os.path.join(out_dir, f"{tag}_{time.strftime('%Y%m%d_%H%M%S')}")
    os.makedirs(run_dir, exist_ok=True)
    return run_dir


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FMT % value
    return "" if value is None else str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    logging.info(f"wrote {path}")


def write_table(path, header, table):
    """Numeric (N, C) table with a header row."""
    table = np.asarray(table, dtype=np.float64).reshape(-1, len(header))
    np.savetxt(path, table, fmt=FLOAT_FMT, delimiter=",", header=",".join(header), comments="")
    logging.info(f"wrote {path}")


def read_csv(path):
    with open(path, "r", newline="") as f:
        return list(csv.DictReader(f))


def write_episode(run_dir, result, summary):
    traj = np.column_stack([result.times, result.states, result.commands])
    write_table(
        os.path.join(run_dir, "trajectory.csv"),
        ["t", "x", "y", "theta", "v", "steer", "speed_cmd"],
        traj,
    )
    write_csv(
        os.path.join(run_dir, "laps.csv"),
        ["lap", "lap_time_s"],
        [(i + 1, t) for i, t in enumerate(result.lap_times)],
    )
    write_csv(
        os.path.join(run_dir, "latency.csv"),
        ["cycle", "seconds"],
        list(enumerate(result.cycle_latencies)),
    )
    write_csv(os.path.join(run_dir, "summary.csv"), list(summary), [list(summary.values())])


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def write_json(path, doc):
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, default=_jsonable)
    logging.info(f"wrote {path}")


def read_json(path):
    with open(path, "r") as f:
        return json.load(f)


def pipeline_dump(output, scan, pose):
    r"""
    JSON document of one centerline extraction with every intermediate.

    Args:
        output (`CenterlineOutput`): full capture from `run_centerline_pipeline`.
        scan (`LidarScan`): the scan it was computed from.
        pose (`Tuple[float, float, float]`): world pose of the vehicle frame.
    """
    tri = output.triangulation
    report = output.report
    retained = np.zeros(len(tri), dtype=bool)
    retained[report.retained] = True
    candidate = np.zeros(len(tri), dtype=bool)
    candidate[report.retained[output.candidate]] = True
    path = output.path
    return {
        "pose": {"x": pose[0], "y": pose[1], "theta": pose[2]},
        "scan": {
            "angle_min": scan.angle_min,
            "angle_increment": scan.angle_increment,
            "range_max": scan.range_max,
            "ranges": scan.ranges,
        },
        "points": output.points.positions,
        "segment_ids": output.points.segment_id,
        "vertices": tri.points,
        "triangles": tri.triangles,
        "retained": retained,
        "condition": list(report.condition),
        "two_class_veto": report.two_class_veto,
        "circumcenters": tri.circumcenters,
        "candidate": candidate,
        "chain": output.chain,
        "smoothed": output.smoothed,
        "centerline": None if path is None else path.points,
        "curvature": None if path is None else path.curvature,
        "signed_curvature": None if path is None else path.signed_curvature,
    }
