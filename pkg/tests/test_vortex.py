from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nhvortex import vortex
from nhvortex.berry import PauliModel, berry_phase_line_integral, pauli_connection
from nhvortex.core2x2 import PauliParams, el_distance, is_exceptional
from nhvortex.errors import OnFilament
from nhvortex.paths import ClosedPath, circle

HALF_PI = math.pi / 2


def test_curl_field_examples():
    v = vortex.curl_fields(PauliParams.from_point((0, 0, 1)))
    assert np.allclose(v.a_plus, [0.25, 0, 0]) and np.allclose(v.a_minus, [-0.25, 0, 0])
    assert v.d_plus == 1 and v.d_minus == 1
    v = vortex.curl_fields(PauliParams.from_point((1, 0, 0)))
    assert np.allclose(v.a_plus, [0, 0.25, -0.25]) and np.allclose(v.a_minus, [0, 0.25, 0.25])
    with pytest.raises(OnFilament):
        vortex.curl_fields(PauliParams.from_point((0, 1, 1)))


@pytest.mark.parametrize(
    "x, expected",
    [((0, 0, 1), (0.5, 0, 0)), ((0, 0, -1), (-0.5, 0, 0)), ((1, 0, 0), (0, 0, -0.5))],
)
def test_combined_vortex_examples(x, expected):
    assert np.allclose(vortex.combined_vortex(PauliParams.from_point(x)), expected)


def test_filaments_lie_on_exceptional_lines():
    for f in vortex.pauli_filaments():
        for t in (-2.0, 0.5, 3.0):
            x = np.asarray(f.anchor) + t * np.asarray(f.direction)
            assert is_exceptional(PauliParams.from_point(x), 1e-12)


def test_scalar_sign_fit():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, (200, 3))
    pts = pts[el_distance(pts) > 0.3]
    assert vortex.fit_scalar_sign(pts) == pytest.approx(-1.0, abs=1e-6)


def test_residual_is_gradient_of_scalar():
    rng = np.random.default_rng(4)
    pts = rng.uniform(-2, 2, (100, 3))
    pts = pts[el_distance(pts) > 0.3]
    h = 1e-5
    grad = np.empty((len(pts), 3), dtype=complex)
    for g in range(3):
        step = np.zeros(3)
        step[g] = h
        grad[:, g] = (vortex.gauge_scalar(pts + step) - vortex.gauge_scalar(pts - step)) / (2 * h)
    residual = pauli_connection(pts) - vortex.combined_vortex_field(pts)
    assert np.abs(residual - grad).max() < 1e-6


def test_residual_is_curl_free():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-2, 2, (100, 3))
    pts = pts[el_distance(pts) > 0.3]
    h = 1e-5

    def field(x):
        return pauli_connection(x) - vortex.combined_vortex_field(x)

    jac = np.empty((len(pts), 3, 3), dtype=complex)  # jac[:, i, j] = d_j F_i
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        jac[:, :, j] = (field(pts + step) - field(pts - step)) / (2 * h)
    curl = np.stack([jac[:, 2, 1] - jac[:, 1, 2], jac[:, 0, 2] - jac[:, 2, 0], jac[:, 1, 0] - jac[:, 0, 1]], axis=1)
    assert np.linalg.norm(curl, axis=1).max() < 1e-6


def test_gauge_residual_examples():
    assert abs(vortex.gauge_residual_loop(circle([0, 2.5, 1], [0, 0, 1], 0.5, 4096))) < 1e-6
    assert abs(vortex.gauge_residual_loop(circle([0, 1, 1], [0, 0, 1], 0.5, 4096))) < 1e-4
    assert abs(vortex.gauge_residual_loop(circle([0, 0, 1], [0, 0, 1], 3.0, 4096))) < 1e-4


def test_winding_examples():
    single = circle([0, 1, 1], [0, 0, 1], 0.5, 512)
    assert vortex.winding_numbers(single) == (1, 0)
    assert vortex.winding_numbers(single.reversed()) == (-1, 0)
    assert vortex.winding_numbers(circle([0, 2.5, 1], [0, 0, 1], 0.5, 512)) == (0, 0)
    w = vortex.winding_numbers(circle([0, 0, 1], [0, 0, 1], 3.0, 512))
    assert w in ((1, 1), (-1, -1))


def test_winding_on_filament():
    path = circle([0, 0, 1], [0, 0, 1], 1.0, 64)  # passes through (0, 1, 1)
    with pytest.raises(OnFilament):
        vortex.winding_numbers(path)


def test_winding_twice_around():
    t = 2 * np.pi * np.arange(1025) / 512  # two turns
    pts = np.stack([0.3 * np.cos(t), 1 + 0.3 * np.sin(t), np.ones_like(t)], axis=1)
    pts[-1] = pts[0]
    path = ClosedPath(pts)
    assert vortex.winding_numbers(path) == (2, 0)
    assert berry_phase_line_integral(PauliModel(), path) == pytest.approx(math.pi, abs=1e-4)


@pytest.mark.parametrize("w_plus, w_minus, expected", [(1, 0, HALF_PI), (0, 0, 0.0), (1, 1, 0.0), (2, -1, 3 * HALF_PI)])
def test_predicted_phase(w_plus, w_minus, expected):
    assert vortex.predicted_phase(w_plus, w_minus) == pytest.approx(expected)


class _PlusOnly:
    def connection(self, x):
        a_plus, _, _, _ = vortex._curl_fields(x)
        return a_plus.astype(complex)

    def el_distance(self, x):
        return el_distance(np.atleast_2d(x))


@pytest.mark.parametrize("turns", [1, 2])
def test_per_filament_flux(turns):
    # loop transverse to the gamma = +alpha line, wound |w| times
    f = vortex.pauli_filaments()[0]
    d = np.asarray(f.direction)
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.cross(d, e1)
    n = 8192 * turns
    t = 2 * np.pi * turns * np.arange(n + 1) / n
    centre = 1.5 * d
    pts = centre + 0.4 * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
    pts[-1] = pts[0]
    path = ClosedPath(pts)
    phase = berry_phase_line_integral(_PlusOnly(), path)
    assert vortex.winding_number(f, path) == turns
    assert abs(phase - HALF_PI * turns) < 1e-6


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2.0), st.floats(0.2, 1.5))
def test_predictor_matches_integral(b0, g0, a0, r):
    path = circle([b0, g0, a0], [0, 0, 1], r, 2048)
    if el_distance(path.points).min() < 0.1:
        return
    predicted = vortex.predicted_phase(*vortex.winding_numbers(path))
    assert abs(berry_phase_line_integral(PauliModel(), path) - predicted) < 1e-4
