import xml.etree.ElementTree as ET

import matplotlib
import numpy as np
from matplotlib.colors import to_hex

SVG_NS = "http://www.w3.org/2000/svg"
DASH = "4 3"


def segment_color(segment_id, cmap="tab10"):
    if segment_id < 0:
        return "#808080"
    cm = matplotlib.colormaps[cmap]
    return to_hex(cm(int(segment_id) % cm.N))


def to_world(points, pose):
    """Vehicle-frame (N, 2) points to the world frame of `pose` = (x, y, theta)."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x, y, theta = pose
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return points @ rot.T + np.array([x, y])


def _coords(points):
    return " ".join(f"{px:.4f},{py:.4f}" for px, py in points)


def _closed_path(parent, polyline, cls, stroke, width, fill="none"):
    pts = np.asarray(polyline)
    d = "M " + " L ".join(f"{px:.4f} {py:.4f}" for px, py in pts) + " Z"
    return ET.SubElement(
        parent, "path", {"class": cls, "d": d, "fill": fill, "stroke": stroke, "stroke-width": f"{width:.4f}"}
    )


def _polyline(parent, points, cls, stroke, width):
    attrs = {
        "class": cls,
        "points": _coords(points),
        "fill": "none",
        "stroke": stroke,
        "stroke-width": f"{width:.4f}",
    }
    return ET.SubElement(parent, "polyline", attrs)


def _dot(parent, xy, r, fill, cls):
    return ET.SubElement(
        parent, "circle", {"class": cls, "cx": f"{xy[0]:.4f}", "cy": f"{xy[1]:.4f}", "r": f"{r:.4f}", "fill": fill}
    )


def _world(dump, key, pose):
    value = dump.get(key)
    if value is None or len(value) == 0:
        return np.zeros((0, 2))
    return to_world(value, pose)


def _draw_dump(root, dump, width):
    pose = (dump["pose"]["x"], dump["pose"]["y"], dump["pose"]["theta"])
    layer = ET.SubElement(root, "g", {"class": "pipeline"})

    vertices = _world(dump, "vertices", pose)
    for tri, kept in zip(dump["triangles"], dump["retained"]):
        attrs = {
            "class": "triangle retained" if kept else "triangle filtered",
            "points": _coords(vertices[tri]),
            "fill": "none",
            "stroke": "#1f77b4" if kept else "#b0b0b0",
            "stroke-width": f"{0.5 * width:.4f}",
        }
        if not kept:
            attrs["stroke-dasharray"] = DASH
        ET.SubElement(layer, "polygon", attrs)

    points = _world(dump, "points", pose)
    segment_ids = dump.get("segment_ids")
    if segment_ids is None:
        segment_ids = [-1] * len(points)
    for xy, seg in zip(points, segment_ids):
        _dot(layer, xy, 1.5 * width, segment_color(seg), "scan-point")

    centers = _world(dump, "circumcenters", pose)
    for xy, kept, cand in zip(centers, dump["retained"], dump["candidate"]):
        if kept:
            _dot(layer, xy, width, "#d62728" if cand else "#ff9896", "circumcenter")

    centerline = _world(dump, "centerline", pose)
    if len(centerline):
        _polyline(layer, centerline, "centerline", "#2ca02c", 1.5 * width)
    _dot(layer, pose[:2], 2.5 * width, "#000000", "vehicle")


def render_svg(track, trajectory=None, dump=None) -> str:
    r"""
    Render a track with optional overlays.

    Args:
        track (`TrackDefinition`): boundaries, obstacles, trap regions and finish line.
        trajectory (`np.ndarray`, *optional*): (T, 2) world positions.
        dump (`dict`, *optional*): pipeline dump as written by the snapshot command.

    Returns:
        `str`: SVG document. The viewBox is the track bounds plus a 5% margin; y points up.
    """
    xmin, ymin, xmax, ymax = track.bounds
    mx, my = 0.05 * (xmax - xmin), 0.05 * (ymax - ymin)
    xmin, xmax, ymin, ymax = xmin - mx, xmax + mx, ymin - my, ymax + my
    w, h = xmax - xmin, ymax - ymin
    width = 0.003 * max(w, h)

    svg = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "viewBox": f"{xmin:.4f} {-ymax:.4f} {w:.4f} {h:.4f}",
            "width": "1000",
            "height": f"{1000 * h / w:.0f}",
        },
    )
    ET.SubElement(svg, "title").text = track.name
    # flip so world y points up
    root = ET.SubElement(svg, "g", {"transform": "scale(1,-1)"})

    for trap in track.trap_regions:
        ET.SubElement(root, "polygon", {"class": "trap", "points": _coords(trap), "fill": "#ffd8d8", "stroke": "none"})
    _closed_path(root, track.outer, "outer", "#000000", 2 * width)
    if len(track.inner):
        _closed_path(root, track.inner, "inner", "#000000", 2 * width)
    for obstacle in track.obstacles:
        _closed_path(root, obstacle, "obstacle", "#000000", 2 * width, fill="#404040")
    _polyline(root, track.finish_line, "finish", "#9467bd", 2 * width)

    if trajectory is not None and len(trajectory):
        _polyline(root, np.asarray(trajectory)[:, :2], "trajectory", "#ff7f0e", width)
    if dump is not None:
        _draw_dump(root, dump, width)

    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode", xml_declaration=True) + "\n"
