from __future__ import annotations

import math

import numpy as np
import pytest

from nhvortex.errors import InvalidLoop
from nhvortex.paths import ClosedPath, circle, polyline, wrap_angle


def test_circle_is_closed_and_counterclockwise():
    path = circle([0, 0, 1], [0, 0, 1], 1.0, 64)
    pts = path.points
    assert np.array_equal(pts[0], pts[-1])
    assert path.n_samples == 64
    # signed area in the (x, y) plane is positive for ccw about +z
    area = 0.5 * np.sum(pts[:-1, 0] * pts[1:, 1] - pts[1:, 0] * pts[:-1, 1])
    assert area > 0
    assert np.allclose(pts[:, 2], 1.0)


def test_orientation_reverses():
    a = circle([0, 0, 0], [1, 1, 0], 0.5, 32)
    b = circle([0, 0, 0], [1, 1, 0], 0.5, 32, orientation=-1)
    assert np.allclose(a.points[::-1], b.points)


def test_invalid_loops():
    with pytest.raises(InvalidLoop):
        circle([0, 0, 0], [0, 0, 1], 0.0, 64)
    with pytest.raises(InvalidLoop):
        circle([0, 0, 0], [0, 0, 0], 1.0, 64)
    with pytest.raises(InvalidLoop):
        ClosedPath(np.zeros((5, 3)))
    pts = circle([0, 0, 0], [0, 0, 1], 1.0, 16).points.copy()
    pts[-1] += 1e-6
    with pytest.raises(InvalidLoop):
        ClosedPath(pts)
    with pytest.raises(InvalidLoop):
        polyline([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_polyline_subdivision_preserves_vertices():
    verts = np.array([[0, 0, 0], [2, 0, 0], [0, 1, 0], [0, 0, 0]], dtype=float)
    path = polyline(verts, 100)
    assert abs(path.n_samples - 100) <= 3
    for v in verts[:-1]:
        assert np.min(np.linalg.norm(path.points - v, axis=1)) == 0.0
    assert path.length() == pytest.approx(2 + math.sqrt(5) + 1)


def test_shift_and_reverse_keep_geometry():
    path = circle([1, 2, 3], [0, 1, 0], 0.7, 50)
    assert path.shifted(7).length() == pytest.approx(path.length())
    assert np.array_equal(path.reversed().points, path.points[::-1])


def test_wrap_angle_range():
    a = wrap_angle(np.array([-3 * math.pi, 0.0, math.pi, 3.5 * math.pi]))
    assert np.all(a > -math.pi) and np.all(a <= math.pi)
    assert a[2] == pytest.approx(math.pi)
