from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhvortex import core2x2
from nhvortex.core2x2 import PauliParams, biorth_pair, eigenvalues, is_exceptional, spin_rotate
from nhvortex.errors import BadAxis, EPDegenerate

coord = st.floats(-5, 5, allow_nan=False)
params = st.builds(PauliParams, alpha=coord, beta=coord, gamma=coord)


def spectrum_gap(a, b) -> float:
    """Distance between two-element spectra under the best pairing."""
    a, b = np.asarray(a), np.asarray(b)
    return min(np.abs(a - b).max(), np.abs(a - b[::-1]).max())


unit = st.tuples(coord, coord, coord).filter(lambda v: np.linalg.norm(v) > 1e-3).map(
    lambda v: np.asarray(v) / np.linalg.norm(v)
)


@pytest.mark.parametrize(
    "alpha, beta, gamma, expected",
    [(1, 0, 0, 1), (1, 0, 1, 0), (0, 3, 4, 3 + 4j)],
)
def test_eigenvalue_examples(alpha, beta, gamma, expected):
    assert eigenvalues(PauliParams(alpha, beta, gamma)) == pytest.approx(expected, abs=1e-15)


def test_branch_tie_break_on_imaginary_axis():
    # sqrt(-1 - 0j) must be +i, not -i
    assert core2x2.branch_sqrt(complex(-1.0, -0.0)) == 1j
    assert eigenvalues(PauliParams(0.0, 0.0, 1.0)) == 1j


@given(params)
def test_eigenvalue_squares_and_branch(p):
    eps = eigenvalues(p)
    assert eps**2 == pytest.approx(p.alpha**2 + complex(p.beta, p.gamma) ** 2, abs=1e-9)
    assert eps.real > 0 or (eps.real == 0 and eps.imag >= 0)


@given(params)
def test_eigenvalues_match_numpy(p):
    eps = eigenvalues(p)
    # an EP is defective, where eig loses ~sqrt(machine eps)
    assert spectrum_gap([eps, -eps], np.linalg.eigvals(p.matrix())) < 1e-6


def test_biorth_hermitian_example():
    pair = biorth_pair(PauliParams(1, 0, 0))
    s = 1 / math.sqrt(2)
    for vec, sign in ((pair.psi_plus, 1), (pair.psi_minus, -1), (pair.phi_plus, 1), (pair.phi_minus, -1)):
        assert np.allclose(vec, [s, sign * s])


def test_biorth_imaginary_example():
    pair = biorth_pair(PauliParams(0, 1, 0))
    s = 1 / math.sqrt(2)
    assert np.allclose(pair.psi_plus, [-1j * s, s])
    assert np.allclose(pair.psi_minus, [-1j * s, -s])
    assert np.allclose(pair.phi_plus, [-1j * s, s])
    assert np.allclose(pair.phi_minus, [-1j * s, -s])
    assert np.vdot(pair.phi_plus, pair.psi_plus) == pytest.approx(1)


def test_biorth_rejects_ep():
    with pytest.raises(EPDegenerate):
        biorth_pair(PauliParams(1, 0, 1))


@given(params)
def test_biorth_properties(p):
    eps = eigenvalues(p)
    if abs(eps) < 1e-3:
        return
    pair = biorth_pair(p)
    assert np.allclose(pair.overlap_matrix(), np.eye(2), atol=1e-10)
    h = p.matrix()
    assert np.allclose(h @ pair.psi_plus, eps * pair.psi_plus, atol=1e-9)
    assert np.allclose(h @ pair.psi_minus, -eps * pair.psi_minus, atol=1e-9)
    hd = h.conj().T
    assert np.allclose(hd @ pair.phi_plus, eps.conjugate() * pair.phi_plus, atol=1e-9)
    assert np.allclose(hd @ pair.phi_minus, -eps.conjugate() * pair.phi_minus, atol=1e-9)


@pytest.mark.parametrize(
    "alpha, beta, gamma, expected",
    [(1, 0, 1, True), (1, 0.5, 1, False), (0, 0, 0, False), (2, 0, -2, True)],
)
def test_is_exceptional(alpha, beta, gamma, expected):
    assert is_exceptional(PauliParams(alpha, beta, gamma), 1e-9) is expected


def test_is_exceptional_rejects_bad_tol():
    with pytest.raises(ValueError):
        is_exceptional(PauliParams(1, 0, 1), 0.0)


@given(st.floats(-3, 3).filter(lambda a: abs(a) > 1e-3), st.sampled_from([1, -1]))
def test_exceptional_points_are_defective(alpha, sign):
    h = PauliParams(alpha, 0.0, sign * alpha).matrix()
    _, vecs = np.linalg.eig(h)
    v1, v2 = vecs[:, 0], vecs[:, 1]
    # parallel eigenvectors: |<v1|v2>| = |v1||v2|
    assert abs(abs(np.vdot(v1, v2)) - 1.0) < 1e-8


@given(params)
def test_chiral_anticommutation(p):
    assert np.array_equal(core2x2.chiral_anticommutator(p), np.zeros((2, 2)))


def test_el_distance_per_line():
    d = core2x2.el_distance(np.array([0.0, 1.0, 1.0]), per_line=True)
    assert d[0] == pytest.approx(0.0) and d[1] == pytest.approx(math.sqrt(2))


def test_spin_rotate_identity():
    p = PauliParams(0.3, -1.2, 0.7)
    assert np.allclose(spin_rotate(p, [0, 0, 1], 0.0).as_array(), [0.3, -1.2 + 0.7j, 0])


def test_spin_rotate_z_pi():
    out = spin_rotate(PauliParams(1, 0, 1), [0, 0, 1], math.pi).as_array()
    assert np.allclose(out, [-1, -1j, 0], atol=1e-15)


def test_spin_rotate_matches_matrix_conjugation():
    p = PauliParams(0.4, 1.1, -0.6)
    axis = np.array([1.0, 2.0, -2.0]) / 3.0
    u = core2x2.su2(axis, 1.3)
    assert np.allclose(spin_rotate(p, axis, 1.3).matrix(), u @ p.matrix() @ u.conj().T, atol=1e-14)


def test_spin_rotate_bad_axis():
    with pytest.raises(BadAxis):
        spin_rotate(PauliParams(1, 0, 0), [1, 1, 0], 0.5)


@given(st.floats(0, 2 * math.pi), unit)
def test_rotated_ep_stays_defective(theta, axis):
    ev = spin_rotate(PauliParams(1, 0, 1), axis, theta).eigenvalues()
    assert abs(ev[0]) < 1e-7 and abs(ev[1]) < 1e-7


@settings(max_examples=100)
@given(params, unit, st.floats(0, 2 * math.pi))
def test_rotation_preserves_spectrum(p, axis, theta):
    eps = eigenvalues(p)
    rotated = np.linalg.eigvals(spin_rotate(p, axis, theta).matrix())
    scale = max(1.0, abs(eps))
    assert spectrum_gap(rotated, [eps, -eps]) < 1e-6 * scale
