"""Berry connections and closed-loop Berry phases for biorthogonal eigenstates.

A *field* is any object exposing

* ``connection(points) -> (..., 3) complex``
* ``eigensystem(points) -> (evals (M, 2), right (M, 2, 2), left (M, 2, 2))``
  with eigenvectors stored as columns and ``left^H right = I``
* ``el_distance(points) -> (M,)`` distance to the nearest exceptional line

Only the pieces an operation actually touches are required.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from . import core2x2
from .core2x2 import EP_TOL, PauliParams
from .errors import EPDivergent, EPProximity, NotQuantized, TrackingLost
from .paths import ClosedPath

__all__ = [
    "NumericEigensystem",
    "PauliModel",
    "Quantized",
    "RotatedPauliModel",
    "WilsonResult",
    "berry_phase_line_integral",
    "berry_phase_wilson",
    "connection_analytic",
    "connection_numeric",
    "pauli_connection",
    "quantize",
]

HALF_PI = 0.5 * math.pi
E2 = np.array([0.0, 1.0], dtype=complex)


def pauli_connection(x) -> np.ndarray:
    """Analytic connection ``(alpha, i alpha, -beta - i gamma) / (2 eps^2)``.

    Vectorized over the leading axes of ``x``; no pole checking.
    """
    x = np.asarray(x, dtype=float)
    beta, gamma, alpha = x[..., 0], x[..., 1], x[..., 2]
    d = 2.0 * (alpha**2 + (beta + 1j * gamma) ** 2)
    num = np.stack([alpha + 0j, 1j * alpha, -beta - 1j * gamma], axis=-1)
    return num / d[..., None]


def connection_analytic(p: PauliParams, tol: float = EP_TOL) -> np.ndarray:
    """Connection vector ordered (beta, gamma, alpha); identical for both bands."""
    eps = core2x2.eigenvalues(p)
    if abs(eps) <= tol:
        raise EPDivergent(f"connection has a pole on the exceptional line at {p}")
    return pauli_connection(p.point)


class PauliModel:
    """The 2x2 family as a field over (beta, gamma, alpha)-space."""

    def hamiltonian(self, points) -> np.ndarray:
        return core2x2.hamiltonian(points)

    def eigensystem(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        eps = core2x2.branch_sqrt(core2x2._eps_squared(points))
        psi_p, psi_m, phi_p, phi_m = core2x2.biorth_vectors(points, eps)
        evals = np.stack([eps, -eps], axis=-1)
        right = np.stack([psi_p, psi_m], axis=-1)
        left = np.stack([phi_p, phi_m], axis=-1)
        return evals, right, left

    def connection(self, points) -> np.ndarray:
        return pauli_connection(points)

    def el_distance(self, points) -> np.ndarray:
        return core2x2.el_distance(np.atleast_2d(points))


class RotatedPauliModel(PauliModel):
    """``U H U^-1`` for a fixed spin rotation U.

    Eigenvectors are ``U psi`` and ``U phi``; the exceptional lines and the
    connection are those of the unrotated family.
    """

    def __init__(self, axis, theta: float):
        self.axis = np.asarray(axis, dtype=float)
        self.theta = float(theta)
        self.u = core2x2.su2(self.axis, self.theta)

    def hamiltonian(self, points) -> np.ndarray:
        return self.u @ core2x2.hamiltonian(points) @ self.u.conj().T

    def eigensystem(self, points):
        evals, right, left = super().eigensystem(points)
        return evals, self.u @ right, self.u @ left

    @property
    def gauge_ref(self) -> np.ndarray:
        """Reference vector reproducing the analytic gauge after rotation."""
        return self.u @ E2


class NumericEigensystem:
    """General-purpose eigensolver route for any 2x2 matrix field.

    Eigenvectors come from LAPACK with arbitrary normalization; the left
    vectors are the rows of ``R^-1`` so biorthonormality holds by construction.
    """

    def __init__(self, hamiltonian, el_distance=None):
        self._hamiltonian = hamiltonian
        self._el_distance = el_distance

    def eigensystem(self, points):
        h = np.asarray(self._hamiltonian(np.atleast_2d(points)))
        evals, right = np.linalg.eig(h)
        left = np.conj(np.swapaxes(np.linalg.inv(right), -1, -2))
        return evals, right, left

    def el_distance(self, points) -> np.ndarray:
        if self._el_distance is None:
            return np.full(len(np.atleast_2d(points)), np.inf)
        return self._el_distance(points)


def _fix_gauge(right, left, ref):
    """Rescale so ``<ref|psi> = 1`` column-wise; keeps ``<phi|psi> = 1``."""
    c = np.einsum("i,...ib->...b", ref.conj(), right)
    if np.any(np.abs(c) < 1e-12):
        raise TrackingLost("eigenvector orthogonal to the gauge reference vector")
    return right / c[..., None, :], left * c.conj()[..., None, :]


def _upper_index(evals) -> np.ndarray:
    """Index of the eigenvalue on the (Re > 0, else Im >= 0) branch."""
    evals = np.atleast_2d(evals)
    re_gap = evals[:, 0].real - evals[:, 1].real
    im_gap = evals[:, 0].imag - evals[:, 1].imag
    scale = np.abs(evals).max(axis=1) + 1e-300
    first = np.where(np.abs(re_gap) > 1e-12 * scale, re_gap > 0, im_gap >= 0)
    return np.where(first, 0, 1)


def _check_margin(field, points, margin: float):
    d = np.asarray(field.el_distance(points))
    i = int(np.argmin(d))
    if d[i] < margin:
        raise EPProximity(
            f"sample {i} at {np.round(points[i], 12).tolist()} lies {d[i]:.3g} from an "
            f"exceptional line (margin {margin:.3g})",
            index=i,
            distance=float(d[i]),
        )


def connection_numeric(field, x, h: float = 1e-5, band: int = 1, gauge_ref=None) -> np.ndarray:
    """Central-difference connection ``i <phi| d psi>`` from an eigenpair provider.

    Displaced eigenpairs are matched to the undisplaced band by maximal
    biorthogonal overlap, then rescaled to the gauge ``<ref|psi> = 1``
    (default ``ref = e2``, which is the gauge of the closed-form vectors).
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    ref = E2 if gauge_ref is None else np.asarray(gauge_ref, dtype=complex)
    x = np.asarray(x, dtype=float)
    stencil = np.vstack([x, x + h * np.eye(3), x - h * np.eye(3)])
    _check_margin(field, stencil, 10 * h)
    evals, right, left = field.eigensystem(stencil)
    right, left = _fix_gauge(right, left, ref)
    b0 = _upper_index(evals[:1])[0] if band == 1 else 1 - _upper_index(evals[:1])[0]
    phi0 = left[0, :, b0]
    overlaps = np.einsum("i,mib->mb", phi0.conj(), right)
    pick = np.argmax(np.abs(overlaps), axis=1)
    psi = right[np.arange(len(stencil)), :, pick]
    dpsi = (psi[1:4] - psi[4:7]) / (2 * h)
    return 1j * (dpsi @ phi0.conj())


def berry_phase_line_integral(field, path: ClosedPath, margin: float | None = None) -> complex:
    """Composite trapezoid rule for the closed-loop integral of the connection.

    The default margin refuses samples closer than ten step lengths to an EL.
    Terms are summed with ``math.fsum`` so the value does not depend on the
    starting sample beyond the rounding of the individual terms.
    """
    pts = path.points
    _check_margin(field, pts, 10 * path.max_step() if margin is None else margin)
    a = field.connection(pts)
    terms = 0.5 * np.sum((a[:-1] + a[1:]) * np.diff(pts, axis=0), axis=1)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


@dataclass(frozen=True)
class WilsonResult:
    phase: complex
    band_swapped: bool
    traversals: int


def berry_phase_wilson(
    field,
    path: ClosedPath,
    band: int = 1,
    gauge_ref=None,
    margin: float | None = None,
    min_overlap: float = 0.1,
    symmetric: bool = True,
) -> WilsonResult:
    """Discrete biorthogonal Wilson loop ``i log prod <phi_j|psi_{j+1}>``.

    The tracked band follows the maximal overlap from sample to sample. When
    it arrives back on the other band (square-root monodromy around an EL) the
    loop is traversed a second time and the accumulated phase halved.

    The logarithm of the product is taken branch-continuously as the sum of
    per-link logarithms. That is well defined because all eigenvectors are
    brought to the single-valued gauge ``<ref|psi> = 1`` first, so each link is
    close to 1 on a sufficiently fine path.

    The one-sided product has a first-order error in the modulus of the
    links (the imaginary part of the phase). With ``symmetric`` each link
    logarithm is averaged with the negated logarithm of the reversed link
    ``<phi_{j+1}|psi_j>``; the leftover second-order terms then integrate to a
    total derivative around the loop and the scheme is second-order.
    """
    ref = E2 if gauge_ref is None else np.asarray(gauge_ref, dtype=complex)
    pts = path.points
    _check_margin(field, pts, 10 * path.max_step() if margin is None else margin)
    verts = path.vertices
    m = len(verts)
    evals, right, left = field.eigensystem(verts)
    right, left = _fix_gauge(right, left, ref)
    nxt = np.roll(np.arange(m), -1)
    # link[j, a, b] = <phi_j^a | psi_{j+1}^b>, back[j, a, b] = <phi_{j+1}^b | psi_j^a>
    link = np.einsum("mia,mib->mab", left.conj(), right[nxt])
    back = np.einsum("mib,mia->mab", left[nxt].conj(), right)
    mag = np.abs(link)

    b_start = int(_upper_index(evals[:1])[0])
    if band != 1:
        b_start = 1 - b_start
    best = np.argmax(mag, axis=2)
    rows, bands, nexts = [], [], []
    b = b_start
    traversals = 0
    while True:
        traversals += 1
        for j in range(m):
            nb = int(best[j, b])
            rows.append(j)
            bands.append(b)
            nexts.append(nb)
            b = nb
        if b == b_start:
            break
        if traversals == 2:
            raise TrackingLost("tracked band did not return after two traversals")
    rows, bands, nexts = np.array(rows), np.array(bands), np.array(nexts)
    chosen = mag[rows, bands, nexts]
    if chosen.min() < min_overlap:
        j = int(rows[np.argmin(chosen)])
        raise TrackingLost(f"overlap {chosen.min():.3g} at sample {j} below {min_overlap}; path too coarse")
    z = np.log(link[rows, bands, nexts])
    if symmetric:
        z = 0.5 * (z - np.log(back[rows, bands, nexts]))
    total = complex(math.fsum(z.real), math.fsum(z.imag))
    phase = 1j * total / traversals
    return WilsonResult(phase=complex(phase), band_swapped=traversals == 2, traversals=traversals)


class Quantized(NamedTuple):
    coefficient: int
    residual: float


def quantize(phase, tol: float = 1e-4, strict: bool = True) -> Quantized:
    """Nearest integer multiple of pi/2 and the absolute residual.

    With ``strict`` a residual above ``tol`` or ``|Im phase| >= tol`` raises
    :class:`NotQuantized`; otherwise the pair is returned regardless.
    """
    phase = complex(phase)
    coef = int(round(phase.real / HALF_PI))
    residual = abs(phase.real - coef * HALF_PI)
    if strict and (residual > tol or abs(phase.imag) >= tol):
        raise NotQuantized(
            f"phase {phase:.6g} is not a multiple of pi/2 (residual {residual:.3g}, "
            f"Im {phase.imag:.3g}, tol {tol:.3g})",
            coefficient=coef,
            residual=residual,
        )
    return Quantized(coef, residual)
