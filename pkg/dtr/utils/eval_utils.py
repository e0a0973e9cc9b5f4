import numpy as np


def mean_std(values):
    """Mean and sample standard deviation; the deviation is 0 for fewer than two values."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        return float("nan"), float("nan")
    std = values.std(ddof=1) if len(values) > 1 else 0.0
    return float(values.mean()), float(std)


def latency_percentiles(latencies):
    latencies = np.asarray(latencies, dtype=np.float64)
    if len(latencies) == 0:
        return {"median": float("nan"), "p95": float("nan"), "p99": float("nan")}
    median, p95, p99 = np.percentile(latencies, [50, 95, 99])
    return {"median": float(median), "p95": float(p95), "p99": float(p99)}


def lap_time_ratio(lap_a, lap_b):
    # mean lap of a over mean lap of b
    mean_a, _ = mean_std(lap_a)
    mean_b, _ = mean_std(lap_b)
    if not np.isfinite(mean_a) or not np.isfinite(mean_b) or mean_b == 0:
        return float("nan")
    return mean_a / mean_b


def summarize_episode(result):
    r"""
    Flat summary row of an `EpisodeResult`.

    Returns:
        `dict`: lap mean/std/min/max (s), latency mean/std/median/p95/p99 (s),
        laps, collisions, trap entries, total time and termination reason.
    """
    lap_mean, lap_std = mean_std(result.lap_times)
    laps = np.asarray(result.lap_times, dtype=np.float64)
    lat_mean, lat_std = mean_std(result.cycle_latencies)
    pct = latency_percentiles(result.cycle_latencies)
    return {
        "laps": len(result.lap_times),
        "lap_mean": lap_mean,
        "lap_std": lap_std,
        "lap_min": float(laps.min()) if len(laps) else float("nan"),
        "lap_max": float(laps.max()) if len(laps) else float("nan"),
        "latency_mean": lat_mean,
        "latency_std": lat_std,
        "latency_median": pct["median"],
        "latency_p95": pct["p95"],
        "latency_p99": pct["p99"],
        "collisions": result.collisions,
        "trap_entries": result.trap_entries,
        "total_time": result.total_time,
        "termination": result.termination,
    }
