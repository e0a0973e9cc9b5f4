from .dtr_pipeline import CenterlineOutput, extract_centerline, run_centerline_pipeline
from .scan import LidarScan, ScanPoint, ScanPoints

__all__ = {
    "CenterlineOutput": CenterlineOutput,
    "extract_centerline": extract_centerline,
    "run_centerline_pipeline": run_centerline_pipeline,
    "LidarScan": LidarScan,
    "ScanPoint": ScanPoint,
    "ScanPoints": ScanPoints,
}
