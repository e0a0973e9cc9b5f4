import math
import time

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from dtr.errors import ConfigError, DegenerateTriangleError
from dtr.geometry import (
    BACKENDS,
    Point2,
    circumcenter,
    circumcenter_xy,
    circumcenters,
    delaunay_triangulate,
    in_circumcircle,
    orient2d,
    point_segments_distance,
    ray_segment_intersect,
    ray_segments_intersect,
    signed_areas,
    triangle_metrics,
    triangles_metrics,
)


def test_orient2d():
    assert orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert orient2d((0, 0), (0, 1), (1, 0)) == -1
    assert orient2d((0, 0), (1, 1), (2, 2)) == 0
    # altitude far below tolerance
    assert orient2d((0, 0), (1, 0), (2, 1e-12)) == 0


def test_circumcenter_right_triangle():
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    c = circumcenter((0, 1, 2), pts)
    assert c == pytest.approx(Point2(1.0, 1.0))
    for p in pts:
        assert math.dist(p, c) == pytest.approx(math.sqrt(2.0))


def test_circumcenter_collinear_raises():
    with pytest.raises(DegenerateTriangleError):
        circumcenter_xy((0, 0), (1, 0), (3, 0))


def test_in_circumcircle_is_strict():
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    assert in_circumcircle((0, 1, 2), pts, (1.0, 1.0))
    # cocircular fourth corner of the square
    assert not in_circumcircle((0, 1, 2), pts, (2.0, 2.0))
    assert not in_circumcircle((0, 1, 2), pts, (5.0, 5.0))


def test_triangle_metrics():
    pts = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]])
    sides, area = triangle_metrics((0, 1, 2), pts)
    assert sides == pytest.approx((3.0, 4.0, 5.0))
    assert area == pytest.approx(6.0)

    batch_sides, batch_area = triangles_metrics(pts, np.array([[0, 1, 2], [0, 2, 1]]))
    np.testing.assert_allclose(batch_sides, [[3, 4, 5], [3, 4, 5]])
    np.testing.assert_allclose(batch_area, [6.0, 6.0])
    assert signed_areas(pts, np.array([[0, 1, 2], [0, 2, 1]])) == pytest.approx([6.0, -6.0])


def test_ray_segment_intersect():
    seg = ((-1.0, 1.0), (1.0, 1.0))
    assert ray_segment_intersect((0, 0), (0, 1), seg) == pytest.approx(1.0)
    assert ray_segment_intersect((0, 0), (0, -1), seg) is None
    assert ray_segment_intersect((5, 0), (0, 1), seg) is None
    # collinear overlap ahead, and starting inside the overlap
    assert ray_segment_intersect((0, 0), (1, 0), ((2, 0), (3, 0))) == pytest.approx(2.0)
    assert ray_segment_intersect((2.5, 0), (1, 0), ((2, 0), (3, 0))) == pytest.approx(0.0)
    assert ray_segment_intersect((4, 0), (1, 0), ((2, 0), (3, 0))) is None


def test_ray_segments_matches_scalar():
    rng = np.random.default_rng(0)
    segments = rng.uniform(-5, 5, size=(12, 2, 2))
    angles = rng.uniform(-math.pi, math.pi, size=64)
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    origin = (0.3, -0.2)
    batch = ray_segments_intersect(origin, directions, segments)
    for d, got in zip(directions, batch):
        hits = [ray_segment_intersect(origin, d, s) for s in segments]
        hits = [h for h in hits if h is not None]
        expected = min(hits) if hits else math.inf
        assert got == pytest.approx(expected)


def test_point_segments_distance():
    segments = np.array([[[1.0, -1.0], [1.0, 1.0]], [[2.0, 2.0], [3.0, 2.0]], [[0.5, 0.0], [0.5, 0.0]]])
    np.testing.assert_allclose(
        point_segments_distance((0.0, 0.0), segments), [1.0, math.hypot(2.0, 2.0), 0.5]
    )


def test_square_has_two_triangles():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1.1)]
    tri = delaunay_triangulate(pts)
    assert len(tri) == 2
    assert (signed_areas(tri.points, tri.triangles) > 0).all()


@pytest.mark.parametrize("backend", BACKENDS)
def test_cocircular_square_takes_the_lower_diagonal(backend):
    tri = delaunay_triangulate([(0, 0), (1, 0), (1, 1), (0, 1)], backend=backend)
    np.testing.assert_array_equal(tri.triangles, [[0, 1, 2], [0, 2, 3]])
    tri = delaunay_triangulate([(1, 1), (0, 1), (0, 0), (1, 0)], backend=backend)
    np.testing.assert_array_equal(tri.triangles, [[0, 1, 2], [0, 2, 3]])


def test_backends_agree_on_cocircular_points():
    a = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    pts = np.stack([np.cos(a), np.sin(a)], axis=-1)
    qhull = delaunay_triangulate(pts, backend="qhull")
    reference = delaunay_triangulate(pts, backend="bowyer_watson")
    assert len(qhull) == 6
    np.testing.assert_array_equal(qhull.triangles, reference.triangles)


def test_random_sets_pass_the_brute_force_oracle():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    for _ in range(200):
        pts = rng.uniform(0, 10, size=(int(rng.integers(3, 201)), 2))
        tri = delaunay_triangulate(pts)
        if tri.empty:
            continue
        radius = np.linalg.norm(tri.points[tri.triangles[:, 0]] - tri.circumcenters, axis=1)
        dist = np.linalg.norm(tri.points[None, :, :] - tri.circumcenters[:, None, :], axis=-1)
        assert not (dist < radius[:, None] - 1e-9).any()
        # the triangles tile the convex hull
        area = signed_areas(tri.points, tri.triangles)
        assert (area > 0).all()
        assert area.sum() == pytest.approx(ConvexHull(tri.points).volume, rel=1e-9)
    assert time.perf_counter() - start < 10.0


def test_orient2d_antisymmetry():
    rng = np.random.default_rng(8)
    for a, b, c in rng.uniform(-5, 5, size=(500, 3, 2)):
        o = orient2d(a, b, c)
        assert orient2d(b, a, c) == -o
        assert orient2d(b, c, a) == o == orient2d(c, a, b)


def test_circumcenter_is_equidistant():
    rng = np.random.default_rng(9)
    for a, b, c in rng.uniform(-5, 5, size=(500, 3, 2)):
        if orient2d(a, b, c, eps=1e-2) == 0:
            continue
        center = np.asarray(circumcenter_xy(a, b, c))
        d = [np.linalg.norm(p - center) for p in (a, b, c)]
        assert max(d) - min(d) < 1e-9 * max(1.0, max(d))


@pytest.mark.parametrize("backend", BACKENDS)
def test_degenerate_inputs_give_empty_triangulation(backend):
    assert delaunay_triangulate([], backend=backend).empty
    assert delaunay_triangulate([(0, 0), (1, 1)], backend=backend).empty
    assert delaunay_triangulate([(0, 0), (1, 1), (2, 2), (3, 3)], backend=backend).empty


def test_duplicates_are_merged():
    pts = [(0, 0), (1, 0), (0, 1), (1, 0), (0, 0)]
    tri = delaunay_triangulate(pts)
    assert len(tri.points) == 3
    assert list(tri.source_index) == [0, 1, 2]
    assert len(tri) == 1


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_circumcircle_property(backend):
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, 10, size=(60, 2))
    tri = delaunay_triangulate(pts, backend=backend)
    assert (signed_areas(tri.points, tri.triangles) > 0).all()
    for t in tri.triangles:
        others = np.setdiff1d(np.arange(len(tri.points)), t)
        assert not any(in_circumcircle(t, tri.points, tri.points[k]) for k in others)
    np.testing.assert_allclose(tri.circumcenters, circumcenters(tri.points, tri.triangles))


def test_triangle_count_matches_euler():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-4, 4, size=(80, 2))
    hull = len(ConvexHull(pts).vertices)
    assert len(delaunay_triangulate(pts)) == 2 * len(pts) - 2 - hull


def test_backends_agree_in_general_position():
    rng = np.random.default_rng(11)
    pts = rng.uniform(-3, 3, size=(40, 2))
    a = delaunay_triangulate(pts, backend="qhull")
    b = delaunay_triangulate(pts, backend="bowyer_watson")
    np.testing.assert_array_equal(a.triangles, b.triangles)


def test_triangulation_is_deterministic():
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 1, size=(30, 2))
    a, b = delaunay_triangulate(pts), delaunay_triangulate(pts.copy())
    np.testing.assert_array_equal(a.triangles, b.triangles)
    np.testing.assert_array_equal(a.circumcenters, b.circumcenters)


def test_unknown_backend():
    with pytest.raises(ConfigError):
        delaunay_triangulate([(0, 0), (1, 0), (0, 1)], backend="flip")
