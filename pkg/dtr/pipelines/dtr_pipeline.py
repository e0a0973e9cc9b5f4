import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from easydict import EasyDict

from dtr.geometry import Triangulation, delaunay_triangulate
from dtr.pipelines.centerline import (
    CenterlinePath,
    FilterReport,
    OrderingParams,
    TriangleFilterParams,
    candidate_mask,
    filter_report,
    fit_spline_resample,
    order_greedy,
    smooth_savitzky_golay,
    thin_waypoints,
)
from dtr.pipelines.scan import LidarScan, ScanPoints, scan_to_points, segment_walls, subsample_boxed
from dtr.utils.config_utils import area_min


@dataclass
class CenterlineOutput:
    r"""
    Every intermediate of one centerline extraction.

    Args:
        points (`ScanPoints`): subsampled scan points with segment ids.
        triangulation (`Triangulation`): Delaunay triangulation of `points`.
        report (`FilterReport`): per-triangle filter outcome.
        candidate (`np.ndarray`): (M,) circumcenter passed the ahead/free-space test (retained triangles only).
        chain (`np.ndarray`): ordered circumcenters.
        smoothed (`np.ndarray`): chain after Savitzky-Golay smoothing.
        path (`CenterlinePath`, *optional*): resampled centerline, None when extraction failed.
    """

    points: ScanPoints
    triangulation: Triangulation
    report: FilterReport
    candidate: np.ndarray
    chain: np.ndarray
    smoothed: np.ndarray
    path: Optional[CenterlinePath]


def filter_params(cfg: EasyDict) -> TriangleFilterParams:
    c = cfg.centerline
    return TriangleFilterParams(
        isosceles_tolerance=c.isosceles_tolerance,
        pointedness_min=c.pointedness_min,
        area_min=area_min(cfg),
        require_two_classes=c.require_two_classes,
    )


def ordering_params(cfg: EasyDict) -> OrderingParams:
    return OrderingParams(
        max_step=cfg.centerline.max_step,
        backward_tolerance=cfg.centerline.backward_tolerance,
    )


def run_centerline_pipeline(scan: LidarScan, cfg: EasyDict) -> CenterlineOutput:
    c = cfg.centerline
    points = subsample_boxed(scan_to_points(scan), cfg.scan.cell)
    points = segment_walls(points, cfg.scan.gap_threshold)
    tri = delaunay_triangulate(points.positions, backend=cfg.geometry.backend)
    labels = points.segment_id[tri.source_index]
    report = filter_report(tri, labels, filter_params(cfg))

    centers = tri.circumcenters[report.retained]
    candidate = candidate_mask(centers, scan, c.margin_free)
    chain = order_greedy(centers[candidate], ordering_params(cfg))
    smoothed = smooth_savitzky_golay(chain, c.sg_window, c.sg_order)
    waypoints = thin_waypoints(smoothed, c.min_waypoint_spacing)

    path = None
    if len(waypoints) >= 2 and np.ptp(waypoints, axis=0).max() > 1e-9:
        path = fit_spline_resample(waypoints, c.ds)
    else:
        logging.debug(
            f"no centerline: {len(points)} points, {len(tri)} triangles, "
            f"{len(report.retained)} retained, {len(chain)} chained"
        )
    return CenterlineOutput(
        points=points,
        triangulation=tri,
        report=report,
        candidate=candidate,
        chain=chain,
        smoothed=smoothed,
        path=path,
    )


def extract_centerline(scan: LidarScan, cfg: EasyDict) -> Optional[CenterlinePath]:
    """Scan to centerline; None when fewer than two ordered waypoints survive."""
    return run_centerline_pipeline(scan, cfg).path
