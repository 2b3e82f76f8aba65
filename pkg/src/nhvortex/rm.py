"""Finite non-Hermitian Rice-Mele chain with a staggered complex potential.

The chain has ``2N`` sites, hopping ``(J0 -+ delta)/2`` and on-site potential
``(-1)^j (i Delta + lambda)`` with periodic boundaries. Its Fourier modes
``k = 2 pi n / N`` decouple into 2x2 core matrices
``H_k = J0 cos(k/2) sx + delta sin(k/2) sy - (lambda + i Delta) sz``.

Parameter-space points are ordered ``(lambda, Delta, delta)`` throughout;
``J0`` is held fixed along any loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from . import core2x2
from .berry import berry_phase_line_integral, pauli_connection, quantize
from .core2x2 import PauliVector3, branch_sqrt
from .errors import Degenerate, EPDivergent, EPProximity, OddN
from .paths import ClosedPath
from .vortex import Filament, predict_from_filaments

__all__ = [
    "CanonicalCoeffs",
    "ELCurve",
    "RmModel",
    "RmParams",
    "RmPhase",
    "boundary_connections",
    "boundary_filaments",
    "boundary_vortex_fields",
    "canonical_coeffs",
    "chiral_obstruction",
    "connection_k",
    "core_matrix",
    "el_curves",
    "ground_energy",
    "k_grid",
    "real_space_hamiltonian",
    "real_spectrum_check",
    "rm_berry_phase",
    "spectrum_k",
    "total_connection",
]

COEFF_TOL = 1e-9
FD_STEP = 3e-5


@dataclass(frozen=True)
class RmParams:
    j0: float
    delta_hop: float
    lam: float
    big_delta: float
    n_cells: int

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.j0, self.delta_hop, self.lam, self.big_delta)):
            raise ValueError(f"non-finite parameters: {self}")
        _check_n(self.n_cells)

    @property
    def point(self) -> np.ndarray:
        return np.array([self.lam, self.big_delta, self.delta_hop])

    def at(self, x) -> RmParams:
        lam, big_delta, delta_hop = (float(v) for v in x)
        return RmParams(self.j0, delta_hop, lam, big_delta, self.n_cells)


def _check_n(n_cells: int):
    if int(n_cells) != n_cells or n_cells < 2:
        raise ValueError(f"n_cells must be an integer >= 2, got {n_cells!r}")
    if n_cells % 2:
        raise OddN(f"n_cells = {n_cells} is odd; k = pi is then not on the momentum grid")


def k_grid(n_cells: int) -> np.ndarray:
    """Momenta ``2 pi n / N`` for ``n = 1..N``."""
    _check_n(n_cells)
    return 2 * np.pi * np.arange(1, n_cells + 1) / n_cells


def _half_angles(k):
    """cos(k/2), sin(k/2) with grid-exact zeros at k = pi and 2 pi."""
    c = np.cos(np.asarray(k, dtype=float) / 2)
    s = np.sin(np.asarray(k, dtype=float) / 2)
    c = np.where(np.abs(c) < 1e-14, 0.0, c)
    s = np.where(np.abs(s) < 1e-14, 0.0, s)
    return c, s


def _mode_kind(k: float) -> str:
    """'pi', 'zero' (k = 2 pi) or 'interior'."""
    if math.isclose(k, math.pi, abs_tol=1e-12):
        return "pi"
    if math.isclose(k, 2 * math.pi, abs_tol=1e-12) or math.isclose(k, 0.0, abs_tol=1e-12):
        return "zero"
    return "interior"


def _split(points):
    points = np.asarray(points, dtype=float)
    return points[..., 0], points[..., 1], points[..., 2]


def _eps_sq(j0, points, k):
    lam, big_delta, delta_hop = _split(points)
    c, s = _half_angles(k)
    return (j0 * c) ** 2 + (delta_hop * s) ** 2 + (1j * big_delta + lam) ** 2


def core_matrix(p: RmParams, k: float) -> PauliVector3:
    """Pauli decomposition ``B`` of the core matrix, ``H_k = B . sigma``."""
    c, s = _half_angles(k)
    return PauliVector3(complex(p.j0 * c), complex(p.delta_hop * s), complex(-p.lam, -p.big_delta))


def spectrum_k(p: RmParams, k: float) -> complex:
    return complex(branch_sqrt(_eps_sq(p.j0, p.point, k)))


def ground_energy(p: RmParams) -> complex:
    """``-sum_k eps_k`` of the state with every beta-mode occupied."""
    eps = branch_sqrt(_eps_sq(p.j0, p.point, k_grid(p.n_cells)))
    return -complex(math.fsum(eps.real), math.fsum(eps.imag))


def brackets(p: RmParams) -> np.ndarray:
    """``J0^2 cos^2(k/2) + delta^2 sin^2(k/2) - Delta^2`` on the grid."""
    c, s = _half_angles(k_grid(p.n_cells))
    return (p.j0 * c) ** 2 + (p.delta_hop * s) ** 2 - p.big_delta**2


def real_spectrum_check(p: RmParams) -> bool:
    """Whether the lambda = 0 spectrum is entirely real and non-defective.

    A nonzero ``lambda`` always returns False, including the Hermitian
    corner ``Delta = 0``.
    """
    return p.lam == 0 and bool(np.all(brackets(p) > 0))


def real_space_hamiltonian(p: RmParams) -> np.ndarray:
    """Single-particle matrix of the ``2N``-site chain (sites 1..2N -> rows 0..2N-1)."""
    n_sites = 2 * p.n_cells
    h = np.zeros((n_sites, n_sites), dtype=complex)
    for j in range(1, p.n_cells + 1):
        a, b, c = 2 * j - 2, 2 * j - 1, (2 * j) % n_sites
        h[a, b] = h[b, a] = (p.j0 - p.delta_hop) / 2
        h[b, c] = h[c, b] = (p.j0 + p.delta_hop) / 2
    site = np.arange(1, n_sites + 1)
    h[np.diag_indices(n_sites)] = (-1.0) ** site * (1j * p.big_delta + p.lam)
    return h


@dataclass(frozen=True)
class CanonicalCoeffs:
    u_plus: complex
    u_minus: complex
    v_plus: complex
    v_minus: complex
    zeta_plus: complex
    zeta_minus: complex
    xi_plus: complex
    xi_minus: complex
    eps_k: complex

    def alpha_norm(self) -> complex:
        return self.u_minus * self.u_plus + self.v_minus * self.v_plus

    def beta_norm(self) -> complex:
        return self.zeta_minus * self.zeta_plus + self.xi_minus * self.xi_plus


def canonical_coeffs(p: RmParams, k: float, tol: float = COEFF_TOL) -> CanonicalCoeffs:
    """Coefficients of the canonical modes ``alpha_k`` and ``beta_k``.

    ``beta_bar_k = zeta+ A_k^dag + xi+ B_k^dag`` creates the eigenmode with
    energy ``-eps_k``; ``beta_k = zeta- A_k + xi- B_k`` is its biorthogonal
    partner. The formulas are singular where ``eps_k`` or ``eps_k -+ (i Delta +
    lambda)`` vanishes.
    """
    c, s = _half_angles(k)
    m = complex(p.lam, p.big_delta)
    eps = spectrum_k(p, k)
    if abs(eps) <= tol and abs(m) <= tol:
        raise Degenerate(f"H_k vanishes at k = {k:.6g}: degeneracy point, not an EP")
    if abs(eps) <= tol:
        raise EPDivergent(f"eps_k = 0 at k = {k:.6g}; canonical coefficients diverge")
    if abs(eps + m) <= tol or abs(eps - m) <= tol:
        raise EPDivergent(f"eps_k = +-(i Delta + lambda) at k = {k:.6g}; coefficient formula is singular")
    hop_minus = p.j0 * c - 1j * p.delta_hop * s  # upper sign
    hop_plus = p.j0 * c + 1j * p.delta_hop * s
    n_alpha = np.sqrt(2 * eps * (eps + m))
    n_beta = np.sqrt(2 * eps * (eps - m))
    return CanonicalCoeffs(
        u_plus=complex(hop_minus / n_alpha),
        u_minus=complex(hop_plus / n_alpha),
        v_plus=complex((eps + m) / n_alpha),
        v_minus=complex((eps + m) / n_alpha),
        zeta_plus=complex(hop_minus / n_beta),
        zeta_minus=complex(hop_plus / n_beta),
        xi_plus=complex((-eps + m) / n_beta),
        xi_minus=complex((-eps + m) / n_beta),
        eps_k=eps,
    )


# Boundary modes are written in the chirally rotated frame where the core
# matrix takes the two-Pauli form alpha sx + (lambda + i Delta) sy, with
# alpha = delta (k = pi) or J0 (k = 2 pi). The constant rotation maps
# (0, delta, -m) -> (delta, m, 0) and (-J0, 0, -m) -> (J0, m, 0).
_FRAME_PI = core2x2.su2(np.array([1.0, 1.0, -1.0]) / math.sqrt(3.0), 2 * math.pi / 3)
_FRAME_ZERO = core2x2.su2(np.array([0.0, 1.0, -1.0]) / math.sqrt(2.0), math.pi)


def _frame(kind: str) -> np.ndarray:
    return _FRAME_PI if kind == "pi" else _FRAME_ZERO


def _pauli_point(j0, points, kind):
    """Map (lambda, Delta, delta) to (beta, gamma, alpha) of the rotated frame."""
    lam, big_delta, delta_hop = _split(points)
    alpha = delta_hop if kind == "pi" else np.full_like(lam, j0)
    return np.stack([lam, big_delta, alpha], axis=-1)


def _align(value, ref):
    """Pick the sign of ``value`` closest to ``ref`` (branch continuity)."""
    return np.where(np.abs(value - ref) <= np.abs(value + ref), value, -value)


def _mode_states(j0, points, k, eps, norm_ref=None):
    """Right vector and left row of the occupied beta-mode, eps branch given.

    Interior modes use the printed coefficient formulas; boundary modes use
    the closed-form biorthogonal vectors of the rotated frame (band -eps),
    which form a smooth gauge whose connection is the 2x2 result.
    Returns ``right, left_row, norm`` with ``left_row @ right = 1``.
    """
    kind = _mode_kind(k)
    if kind == "interior":
        lam, big_delta, delta_hop = _split(points)
        c, s = _half_angles(k)
        m = lam + 1j * big_delta
        nrm = np.sqrt(2 * eps * (eps - m))
        if norm_ref is not None:
            nrm = _align(nrm, norm_ref)
        hop_minus = j0 * c - 1j * delta_hop * s
        hop_plus = j0 * c + 1j * delta_hop * s
        right = np.stack([hop_minus / nrm, (m - eps) / nrm], axis=-1)
        left_row = np.stack([hop_plus / nrm, (m - eps) / nrm], axis=-1)
        return right, left_row, nrm
    u = _frame(kind)
    _, psi_m, _, phi_m = core2x2.biorth_vectors(_pauli_point(j0, points, kind), eps)
    right = psi_m @ u.conj()  # U^dag psi
    left_row = phi_m.conj() @ u  # phi^dag U
    return right, left_row, None


# fourth-order central first-derivative weights
_STENCIL = ((1 / 12, -2.0), (-2 / 3, -1.0), (2 / 3, 1.0), (-1 / 12, 2.0))


def _mode_connection(j0, points, k, h=FD_STEP):
    """Per-mode connection ``i <beta_k| d beta_bar_k>`` at many points.

    Fourth-order central differences; the eps branch (and normalization root) at the
    displaced points is sign-matched to the centre.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    eps_c = branch_sqrt(_eps_sq(j0, points, k))
    right_c, left_c, norm_c = _mode_states(j0, points, k, eps_c)
    out = np.empty(points.shape[:-1] + (3,), dtype=complex)
    for g in range(3):
        step = np.zeros(3)
        step[g] = h
        d_right = 0
        for w, off in _STENCIL:
            shifted = points + off * step
            eps = _align(branch_sqrt(_eps_sq(j0, shifted, k)), eps_c)
            right, _, _ = _mode_states(j0, shifted, k, eps, norm_ref=norm_c)
            d_right = d_right + w * right
        out[..., g] = 1j * np.sum(left_c * d_right, axis=-1) / h
    return out


def _mode_el_distance(j0, points, k):
    """Distance from points to the exceptional set eps_k = 0."""
    lam, big_delta, delta_hop = _split(np.atleast_2d(points))
    kind = _mode_kind(k)
    if kind == "zero":
        return np.hypot(lam, np.abs(np.abs(big_delta) - abs(j0)))
    if kind == "pi":
        d_line = np.minimum(np.abs(big_delta - delta_hop), np.abs(big_delta + delta_hop)) / math.sqrt(2)
        return np.hypot(lam, d_line)
    c, s = _half_angles(k)
    return np.hypot(lam, _hyperbola_distance(delta_hop, big_delta, abs(j0 * c), abs(s)))


def _hyperbola_distance(x, y, a, b, n_grid=65, n_refine=5):
    """In-plane distance from (x, y) to the curves y = +-sqrt(a^2 + b^2 t^2).

    Grid search over t in a window bounded by the vertical distance, followed
    by a few grid refinements around the best node.
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))  # the curves are symmetric in y
    f0 = np.sqrt(a**2 + (b * x) ** 2)
    best = np.abs(y - f0)
    centre = x.copy()
    width = best.copy() + 1e-12
    u = np.linspace(-1.0, 1.0, n_grid)
    for _ in range(n_refine):
        t = centre[..., None] + width[..., None] * u
        f = np.sqrt(a**2 + (b * t) ** 2)
        d2 = (t - x[..., None]) ** 2 + np.minimum((y[..., None] - f) ** 2, (y[..., None] + f) ** 2)
        i = np.argmin(d2, axis=-1)
        best = np.minimum(best, np.sqrt(np.take_along_axis(d2, i[..., None], -1)[..., 0]))
        centre = np.take_along_axis(t, i[..., None], -1)[..., 0]
        width = width * 4.0 / (n_grid - 1)
    return best


def connection_k(p: RmParams, k: float, h: float = FD_STEP) -> np.ndarray:
    """Single-particle connection of mode ``k``, ordered (lambda, Delta, delta)."""
    d = float(_mode_el_distance(p.j0, p.point, k)[0])
    if d < 10 * h:
        raise EPProximity(f"mode k = {k:.6g} is exceptional within {d:.3g} of {p}", distance=d)
    if _mode_kind(k) == "interior" and abs(spectrum_k(p, k) - complex(p.lam, p.big_delta)) < 10 * h:
        raise EPProximity(f"printed coefficients of mode k = {k:.6g} are singular at {p}")
    return _mode_connection(p.j0, p.point, k, h)[0]


def boundary_connections(points, j0: float):
    """Closed forms ``A_0 = (J0, i J0, 0)/(2 eps_0^2)`` and ``A_pi``."""
    points = np.asarray(points, dtype=float)
    a_zero = pauli_connection(_pauli_point(j0, points, "zero"))
    a_zero[..., 2] = 0.0  # J0 is not a loop coordinate
    a_pi = pauli_connection(_pauli_point(j0, points, "pi"))
    return a_zero, a_pi


def _vortex_pair(alpha, lam, big_delta):
    d_plus = (big_delta + alpha) ** 2 + lam**2
    d_minus = (big_delta - alpha) ** 2 + lam**2
    a_p = np.stack([-big_delta + alpha, lam, -lam], axis=-1) / (4 * d_minus[..., None])
    a_m = np.stack([-big_delta - alpha, lam, lam], axis=-1) / (4 * d_plus[..., None])
    return a_p, a_m


def boundary_vortex_fields(points, j0: float):
    """``sum_sigma sigma A_{0,sigma}`` and ``sum_sigma sigma A_{pi,sigma}``."""
    lam, big_delta, delta_hop = _split(points)
    z_p, z_m = _vortex_pair(np.full_like(lam, j0), lam, big_delta)
    p_p, p_m = _vortex_pair(delta_hop, lam, big_delta)
    a_zero = z_p - z_m
    a_zero[..., 2] = 0.0
    return a_zero, p_p - p_m


class RmModel:
    """The many-body connection of |GS> as a field over (lambda, Delta, delta)."""

    def __init__(self, j0: float, n_cells: int, h: float = FD_STEP):
        _check_n(n_cells)
        self.j0 = float(j0)
        self.n_cells = int(n_cells)
        self.h = h
        self.ks = k_grid(n_cells)

    def connection(self, points) -> np.ndarray:
        total = np.zeros(np.shape(points)[:-1] + (3,), dtype=complex)
        for k in self.ks:  # fixed order keeps the sum bitwise reproducible
            total = total + _mode_connection(self.j0, points, k, self.h)
        return total

    def closed_form(self, points) -> np.ndarray:
        a_zero, a_pi = boundary_connections(points, self.j0)
        return a_zero + a_pi

    def curvature(self, points, h: float = 1e-5) -> np.ndarray:
        """Curl of the closed-form connection by central differences.

        Vanishes off the exceptional lines, where all flux is carried by the
        filaments.
        """
        points = np.asarray(points, dtype=float)
        jac = np.empty(points.shape[:-1] + (3, 3), dtype=complex)  # jac[..., i, j] = d_j A_i
        for j in range(3):
            step = np.zeros(3)
            step[j] = h
            jac[..., :, j] = (self.closed_form(points + step) - self.closed_form(points - step)) / (2 * h)
        return np.stack(
            [jac[..., 2, 1] - jac[..., 1, 2], jac[..., 0, 2] - jac[..., 2, 0], jac[..., 1, 0] - jac[..., 0, 1]],
            axis=-1,
        )

    def mode_distances(self, points) -> np.ndarray:
        """Distance to each mode's exceptional set; trailing axis over k."""
        return np.stack([_mode_el_distance(self.j0, points, k) for k in self.ks], axis=-1)

    def el_distance(self, points) -> np.ndarray:
        # k and 2 pi - k share one exceptional curve
        half = [k for k in self.ks if k <= math.pi + 1e-12] + [self.ks[-1]]
        return np.stack([_mode_el_distance(self.j0, points, k) for k in half], axis=-1).min(axis=-1)


class BoundaryResidualField:
    """``A_0 - A_0^vortex`` or ``A_pi - A_pi^vortex``; a pure gradient."""

    def __init__(self, j0: float, n_cells: int, which: str):
        self.model = RmModel(j0, n_cells)
        self.which = which

    def connection(self, points) -> np.ndarray:
        exact = boundary_connections(points, self.model.j0)
        vortex = boundary_vortex_fields(points, self.model.j0)
        i = 0 if self.which == "zero" else 1
        return exact[i] - vortex[i]

    def el_distance(self, points) -> np.ndarray:
        return self.model.el_distance(points)


def total_connection(p: RmParams, h: float = FD_STEP) -> np.ndarray:
    model = RmModel(p.j0, p.n_cells, h)
    d = float(model.el_distance(p.point)[0])
    if d < 10 * h:
        raise EPProximity(f"{p} lies within {d:.3g} of an exceptional line", distance=d)
    return model.connection(p.point[None, :])[0]


@dataclass(frozen=True)
class ELCurve:
    """Exceptional curve of one critical momentum in the lambda = 0 plane."""

    k_c: float
    k_index: int
    kind: str
    topological: bool
    delta_hop: np.ndarray = field(repr=False)
    big_delta: np.ndarray = field(repr=False)
    branch: np.ndarray = field(repr=False)

    @property
    def samples(self) -> np.ndarray:
        return np.stack([self.delta_hop, self.big_delta], axis=-1)

    def condition_residual(self, j0: float) -> np.ndarray:
        c, s = _half_angles(self.k_c)
        return (j0 * c) ** 2 + (self.delta_hop * s) ** 2 - self.big_delta**2


def el_curves(p: RmParams, n_delta: int = 601, span: float = 3.0) -> list[ELCurve]:
    """One curve per distinct ``cos^2(k/2)`` on the grid, ordered by k index.

    ``delta`` is swept over ``[-span J0, span J0]``; both Delta branches are
    emitted. The k = pi family omits ``delta = 0`` (the degeneracy point at
    the origin is not an EP).
    """
    if p.lam != 0:
        raise ValueError("exceptional curves are defined on the lambda = 0 slice")
    n = p.n_cells
    deltas = np.linspace(-span * p.j0, span * p.j0, n_delta)
    curves = []
    for idx in list(range(1, n // 2 + 1)) + [n]:
        k = 2 * math.pi * idx / n
        kind = _mode_kind(k)
        if kind == "pi":
            d = deltas[deltas != 0.0]
            rows = [(d, br * d) for br in (1, -1)]
        elif kind == "zero":
            rows = [(deltas, np.full_like(deltas, br * p.j0)) for br in (1, -1)]
        else:
            c, s = _half_angles(k)
            mag = np.sqrt((p.j0 * c) ** 2 + (deltas * s) ** 2)
            rows = [(deltas, br * mag) for br in (1, -1)]
        delta_hop = np.concatenate([r[0] for r in rows])
        big_delta = np.concatenate([r[1] for r in rows])
        branch = np.repeat([1, -1], [len(rows[0][0]), len(rows[1][0])])
        order = np.lexsort((-branch, delta_hop))
        boundary = kind != "interior"
        curves.append(
            ELCurve(
                k_c=k,
                k_index=idx,
                kind="boundary" if boundary else "non_boundary",
                topological=boundary,
                delta_hop=delta_hop[order],
                big_delta=big_delta[order],
                branch=branch[order],
            )
        )
    return curves


def boundary_filaments(j0: float) -> list[Filament]:
    """The four topological exceptional lines in (lambda, Delta, delta)-space.

    Directions follow the circulation of the corresponding curl field, so
    each carries flux ``sign * pi/2`` per unit winding.
    """
    r2 = 1 / math.sqrt(2.0)
    return [
        Filament((0.0, j0, 0.0), (0.0, 0.0, 1.0), +1, "Delta=+J0"),
        Filament((0.0, -j0, 0.0), (0.0, 0.0, 1.0), -1, "Delta=-J0"),
        Filament((0.0, 0.0, 0.0), (0.0, r2, r2), +1, "Delta=+delta"),
        Filament((0.0, 0.0, 0.0), (0.0, -r2, r2), -1, "Delta=-delta"),
    ]


@dataclass(frozen=True)
class RmPhase:
    phase: complex
    predicted: float
    windings: list[int]
    coefficient: int
    residual: float


def rm_berry_phase(path: ClosedPath, p: RmParams, h: float = FD_STEP, margin: float | None = None) -> RmPhase:
    """Loop integral of the total connection plus the filament-flux prediction.

    Only ``p.j0`` and ``p.n_cells`` are used; the loop supplies
    (lambda, Delta, delta).
    """
    model = RmModel(p.j0, p.n_cells, h)
    phase = berry_phase_line_integral(model, path, margin)
    predicted, windings = predict_from_filaments(boundary_filaments(p.j0), path)
    q = quantize(phase, strict=False)
    return RmPhase(phase, predicted, windings, q.coefficient, q.residual)


def chiral_obstruction(k: float, samples, j0: float = 1.0) -> float:
    """Smallest normalized anticommutator of ``C = c . sigma`` with ``H_k``.

    ``{c . sigma, B . sigma} = 2 (c . B)``, so the best parameter-independent
    C over the sampled parameters minimizes the Rayleigh quotient of
    ``M = sum_i conj(B_i) B_i^T / |B_i|^2``; the result is its smallest
    eigenvalue divided by the number of samples. Zero means a chiral operator
    exists for this mode.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    lam, big_delta, delta_hop = _split(samples)
    c, s = _half_angles(k)
    b = np.stack([np.full_like(lam, j0 * c) + 0j, delta_hop * s + 0j, -lam - 1j * big_delta], axis=-1)
    b = b / np.linalg.norm(b, axis=-1, keepdims=True)
    m = np.einsum("ni,nj->ij", b.conj(), b) / len(b)
    return float(np.linalg.eigvalsh(m)[0])
