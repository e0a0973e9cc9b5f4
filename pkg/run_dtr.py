import argparse
import logging
import os
import sys
import time

import numpy as np
import tqdm
from easydict import EasyDict

from dtr.controllers import CONTROLLERS, ControllerState, build_controller, dtr_step
from dtr.errors import ConfigError, DTRError
from dtr.pipelines import run_centerline_pipeline
from dtr.sim import COLLISION, LAPS, LidarSpec, VehicleState, load_track, run_episode, simulate_lidar
from dtr.utils import eval_utils, io_utils, svg_utils
from dtr.utils.config_utils import load_config

MIN_BENCH_CYCLES = 100


class _Parser(argparse.ArgumentParser):
    # usage errors share exit status 1 with config errors; 2 means collision
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def run_config(args) -> EasyDict:
    """Validated run settings plus the full parameter tree."""
    run = EasyDict(
        track=args.track,
        controller=getattr(args, "controller", "dtr"),
        laps=getattr(args, "laps", 1),
        seed=args.seed,
        out=args.out,
        quiet=args.quiet,
    )
    if run.controller not in CONTROLLERS:
        raise ConfigError(f"unknown controller {run.controller!r}, valid ids: {', '.join(CONTROLLERS)}")
    if run.laps < 1:
        raise ConfigError(f"laps must be at least 1, got {run.laps}")
    run.cfg = load_config(args.overrides)
    return run


def pose_arg(text):
    try:
        x, y, theta = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed pose {text!r}, expected x,y,theta") from None
    return x, y, theta


def check_pose(pose, track):
    if pose is None:
        return track.start_pose
    x, y, theta = pose
    if not track.in_drivable((x, y))[0]:
        raise ConfigError(f"pose ({x}, {y}) is outside the drivable region of {track.name}")
    return x, y, theta


def episode_status(result) -> int:
    if result.termination == LAPS:
        return 0
    if result.termination == COLLISION:
        return 2
    return 1


def print_summary(label, summary):
    print(
        f"{label}: {summary['laps']} laps, mean {summary['lap_mean']:.3f}s, std {summary['lap_std']:.3f}s, "
        f"latency {1e3 * summary['latency_mean']:.3f}ms, collisions {summary['collisions']}, "
        f"trap_entries {summary['trap_entries']}, {summary['termination']}"
    )


def _race(run, track, controller_id, run_dir):
    controller = build_controller(controller_id, run.cfg)
    result = run_episode(controller, track, run.cfg, run.laps, seed=run.seed, progress=not run.quiet)
    summary = eval_utils.summarize_episode(result)
    io_utils.write_episode(run_dir, result, summary)
    if result.error:
        print(f"{controller_id}: controller error: {result.error}", file=sys.stderr)
    print_summary(controller_id, summary)
    return result, summary


def cmd_race(args) -> int:
    run = run_config(args)
    track = load_track(run.track)
    run_dir = io_utils.make_run_dir(run.out, f"race_{track.name}_{run.controller}")
    logging.info(f"output dir = {run_dir}")
    result, _ = _race(run, track, run.controller, run_dir)
    return episode_status(result)


def cmd_compare(args) -> int:
    run = run_config(args)
    track = load_track(run.track)
    run_dir = io_utils.make_run_dir(run.out, f"compare_{track.name}")
    logging.info(f"output dir = {run_dir}")

    rows, laps, status = [], {}, 0
    for controller_id in ("dtr", "ftg"):
        sub_dir = os.path.join(run_dir, controller_id)
        os.makedirs(sub_dir, exist_ok=True)
        result, summary = _race(run, track, controller_id, sub_dir)
        rows.append(
            (
                controller_id,
                summary["lap_mean"],
                summary["lap_std"],
                summary["latency_mean"],
                summary["collisions"],
                summary["trap_entries"],
            )
        )
        laps[controller_id] = result.lap_times
        status = max(status, episode_status(result))
        # flush after every run so a later failure keeps earlier results
        io_utils.write_csv(
            os.path.join(run_dir, "comparison.csv"),
            ["controller", "lap_mean", "lap_std", "latency_mean", "collisions", "trap_entries"],
            rows,
        )

    ratio = eval_utils.lap_time_ratio(laps["dtr"], laps["ftg"])
    print(f"lap time ratio dtr/ftg: {ratio:.3f}")
    return status


def cmd_render(args) -> int:
    track = load_track(args.track)
    trajectory = None
    if args.trajectory:
        rows = io_utils.read_csv(args.trajectory)
        trajectory = np.array([(float(r["x"]), float(r["y"])) for r in rows]).reshape(-1, 2)
    dump = io_utils.read_json(args.dump) if args.dump else None
    run_dir = io_utils.make_run_dir(args.out, f"render_{track.name}")
    path = os.path.join(run_dir, "render.svg")
    with open(path, "w") as f:
        f.write(svg_utils.render_svg(track, trajectory=trajectory, dump=dump))
    print(path)
    return 0


def cmd_snapshot(args) -> int:
    run = run_config(args)
    track = load_track(run.track)
    pose = check_pose(args.pose, track)
    spec = LidarSpec.from_config(run.cfg)
    scan = simulate_lidar(VehicleState(*pose), track, spec, np.random.default_rng(run.seed))
    output = run_centerline_pipeline(scan, run.cfg)
    dump = io_utils.pipeline_dump(output, scan, pose)

    run_dir = io_utils.make_run_dir(run.out, f"snapshot_{track.name}")
    io_utils.write_json(os.path.join(run_dir, "snapshot.json"), dump)
    with open(os.path.join(run_dir, "snapshot.svg"), "w") as f:
        f.write(svg_utils.render_svg(track, dump=dump))
    n_path = 0 if output.path is None else len(output.path.points)
    print(
        f"{track.name} at ({pose[0]:.2f}, {pose[1]:.2f}, {pose[2]:.3f}): {len(output.points)} points, "
        f"{len(output.triangulation)} triangles, {len(output.report.retained)} retained, "
        f"{len(output.chain)} chained, {n_path} centerline samples"
    )
    return 0


def cmd_bench(args) -> int:
    run = run_config(args)
    if args.cycles < MIN_BENCH_CYCLES:
        raise ConfigError(f"bench needs at least {MIN_BENCH_CYCLES} cycles, got {args.cycles}")
    track = load_track(run.track)
    pose = check_pose(args.pose, track)
    spec = LidarSpec.from_config(run.cfg)
    scan = simulate_lidar(VehicleState(*pose), track, spec, np.random.default_rng(run.seed))

    latencies = []
    for _ in tqdm.tqdm(range(args.cycles), disable=run.quiet, desc="bench"):
        start = time.perf_counter()
        dtr_step(scan, ControllerState(), run.cfg)
        latencies.append(time.perf_counter() - start)

    pct = eval_utils.latency_percentiles(latencies)
    run_dir = io_utils.make_run_dir(run.out, f"bench_{track.name}")
    io_utils.write_csv(os.path.join(run_dir, "bench.csv"), ["cycle", "seconds"], list(enumerate(latencies)))
    io_utils.write_csv(
        os.path.join(run_dir, "bench_summary.csv"),
        ["cycles", "median", "p95", "p99"],
        [(args.cycles, pct["median"], pct["p95"], pct["p99"])],
    )
    print(
        f"{args.cycles} cycles on {spec.num_beams} beams: median {1e3 * pct['median']:.3f} ms, "
        f"p95 {1e3 * pct['p95']:.3f} ms, p99 {1e3 * pct['p99']:.3f} ms"
    )
    return 0


COMMANDS = {
    "race": cmd_race,
    "compare": cmd_compare,
    "render": cmd_render,
    "snapshot": cmd_snapshot,
    "bench": cmd_bench,
}


def build_parser():
    parser = _Parser(description="Reactive racing with Delaunay-triangulation centerlines.")
    common = _Parser(add_help=False)
    common.add_argument("--track", type=str, default="oval", help="Track JSON path or shipped track name.")
    common.add_argument("--out", type=str, default="outputs", help="Output directory.")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a parameter, e.g. centerline.max_step=1.2. Repeatable.",
    )
    common.add_argument("--seed", type=int, default=0, help="Seed for lidar noise.")
    common.add_argument("--quiet", action="store_true", help="No progress bars, warnings only.")

    sub = parser.add_subparsers(dest="command", required=True)
    race = sub.add_parser("race", parents=[common], help="Run one episode.")
    race.add_argument("--controller", type=str, default="dtr", help=f"One of {', '.join(CONTROLLERS)}.")
    race.add_argument("--laps", type=int, default=5, help="Laps to complete.")

    compare = sub.add_parser("compare", parents=[common], help="Run dtr and ftg on the same track.")
    compare.add_argument("--laps", type=int, default=5, help="Laps to complete.")

    render = sub.add_parser("render", parents=[common], help="Render a track to SVG.")
    render.add_argument("--trajectory", type=str, default=None, help="trajectory.csv to overlay.")
    render.add_argument("--dump", type=str, default=None, help="Snapshot JSON to overlay.")

    snapshot = sub.add_parser("snapshot", parents=[common], help="Dump one centerline extraction.")
    snapshot.add_argument("--pose", type=pose_arg, default=None, help="x,y,theta; defaults to the start pose.")

    bench = sub.add_parser("bench", parents=[common], help="Time the dtr controller.")
    bench.add_argument("--cycles", type=int, default=1000, help="Number of timed cycles.")
    bench.add_argument("--pose", type=pose_arg, default=None, help="x,y,theta; defaults to the start pose.")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO)
    try:
        return COMMANDS[args.command](args)
    except (DTRError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if "__main__" == __name__:
    sys.exit(main())
