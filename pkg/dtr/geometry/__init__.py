from .delaunay import BACKENDS, Triangulation, delaunay_triangulate, dedup_points
from .predicates import (
    EPS_GEOM,
    Point2,
    circumcenter,
    circumcenter_xy,
    circumcenters,
    in_circumcircle,
    orient2d,
    point_segments_distance,
    ray_segment_intersect,
    ray_segments_intersect,
    signed_areas,
    triangle_metrics,
    triangles_metrics,
)

__all__ = {
    "BACKENDS": BACKENDS,
    "Triangulation": Triangulation,
    "delaunay_triangulate": delaunay_triangulate,
    "dedup_points": dedup_points,
    "EPS_GEOM": EPS_GEOM,
    "Point2": Point2,
    "circumcenter": circumcenter,
    "circumcenter_xy": circumcenter_xy,
    "circumcenters": circumcenters,
    "in_circumcircle": in_circumcircle,
    "orient2d": orient2d,
    "point_segments_distance": point_segments_distance,
    "ray_segment_intersect": ray_segment_intersect,
    "ray_segments_intersect": ray_segments_intersect,
    "signed_areas": signed_areas,
    "triangle_metrics": triangle_metrics,
    "triangles_metrics": triangles_metrics,
}
