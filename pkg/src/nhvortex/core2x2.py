"""Exact solution of the 2x2 non-Hermitian model ``H = a sx + (b + i g) sy``.

Parameter-space points are stored in the fixed coordinate order
``(beta, gamma, alpha)``; every vectorized helper here takes arrays whose last
axis has that layout.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import BadAxis, EPDegenerate

__all__ = [
    "EP_TOL",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "BiorthPair",
    "PauliParams",
    "PauliVector3",
    "biorth_pair",
    "biorth_vectors",
    "branch_sqrt",
    "chiral_anticommutator",
    "eigenvalues",
    "el_distance",
    "EL_DIRECTIONS",
    "hamiltonian",
    "is_exceptional",
    "rotation_matrix",
    "spin_rotate",
    "su2",
]

EP_TOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

# unit directions of the lines beta = 0, gamma = +alpha and gamma = -alpha
EL_DIRECTIONS = np.array([[0.0, 1.0, 1.0], [0.0, -1.0, 1.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class PauliParams:
    """Real coefficients of ``H = alpha sx + (beta + i gamma) sy``."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.gamma)):
            raise ValueError(f"non-finite parameters: {self}")

    @classmethod
    def from_point(cls, x) -> PauliParams:
        beta, gamma, alpha = (float(v) for v in x)
        return cls(alpha=alpha, beta=beta, gamma=gamma)

    @property
    def point(self) -> np.ndarray:
        return np.array([self.beta, self.gamma, self.alpha])

    def pauli_vector(self) -> PauliVector3:
        return PauliVector3(complex(self.alpha), complex(self.beta, self.gamma), 0j)

    def matrix(self) -> np.ndarray:
        return hamiltonian(self.point)


@dataclass(frozen=True)
class PauliVector3:
    """Coefficients of a traceless 2x2 operator ``bx sx + by sy + bz sz``."""

    bx: complex
    by: complex
    bz: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz], dtype=complex)

    def matrix(self) -> np.ndarray:
        return np.tensordot(self.as_array(), PAULI, axes=1)

    def eigenvalues(self) -> tuple[complex, complex]:
        b = self.as_array()
        e = complex(branch_sqrt(np.sum(b * b)))
        return e, -e


@dataclass(frozen=True)
class BiorthPair:
    """Right eigenvectors of H and H^dagger, normalized so <phi_s|psi_s> = 1."""

    psi_plus: np.ndarray
    psi_minus: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    eps: complex

    def overlap_matrix(self) -> np.ndarray:
        """``M[s, t] = <phi_s|psi_t>`` with rows/columns ordered (+, -)."""
        phis = np.stack([self.phi_plus, self.phi_minus])
        psis = np.stack([self.psi_plus, self.psi_minus])
        return phis.conj() @ psis.T


def branch_sqrt(z):
    """Complex square root with Re >= 0, and Im >= 0 when Re == 0.

    numpy's principal root already has Re >= 0 but returns ``-i`` for
    ``sqrt(-1 - 0j)``; the signed-zero case is folded back here.
    """
    r = np.sqrt(np.asarray(z, dtype=complex))
    flip = (r.real == 0) & (r.imag < 0)
    return np.where(flip, -r, r)


def _eps_squared(x):
    x = np.asarray(x, dtype=float)
    beta, gamma, alpha = x[..., 0], x[..., 1], x[..., 2]
    return alpha**2 + (beta + 1j * gamma) ** 2


def hamiltonian(x) -> np.ndarray:
    """Matrix of H at one or many points; shape ``(..., 2, 2)``."""
    x = np.asarray(x, dtype=float)
    beta, gamma, alpha = x[..., 0], x[..., 1], x[..., 2]
    coeff = np.stack([alpha + 0j, beta + 1j * gamma, np.zeros_like(alpha, dtype=complex)], axis=-1)
    return np.einsum("...i,ijk->...jk", coeff, PAULI)


def eigenvalues(p: PauliParams) -> complex:
    """Branch value ``eps`` of the spectrum ``{+eps, -eps}``."""
    return complex(branch_sqrt(_eps_squared(p.point)))


def biorth_vectors(x, eps):
    """Biorthogonal eigenvectors at points ``x`` for a supplied branch ``eps``.

    ``eps`` may be either square root of ``alpha^2 + (beta + i gamma)^2``;
    passing a continued branch keeps the vectors smooth along a path.

    Returns
    -------
    psi_plus, psi_minus, phi_plus, phi_minus : ndarray, shape (..., 2)
    """
    x = np.asarray(x, dtype=float)
    eps = np.asarray(eps, dtype=complex)
    beta, gamma, alpha = x[..., 0], x[..., 1], x[..., 2]
    top_r = (alpha - 1j * beta + gamma) / eps
    top_l = (alpha - 1j * beta - gamma) / eps.conj()
    one = np.ones_like(top_r)
    s = 1.0 / math.sqrt(2.0)
    psi_p = s * np.stack([top_r, one], axis=-1)
    psi_m = s * np.stack([top_r, -one], axis=-1)
    phi_p = s * np.stack([top_l, one], axis=-1)
    phi_m = s * np.stack([top_l, -one], axis=-1)
    return psi_p, psi_m, phi_p, phi_m


def biorth_pair(p: PauliParams, tol: float = EP_TOL) -> BiorthPair:
    eps = eigenvalues(p)
    if abs(eps) <= tol:
        raise EPDegenerate(f"eigenvectors coalesce at {p} (|eps| = {abs(eps):.3g})")
    psi_p, psi_m, phi_p, phi_m = biorth_vectors(p.point, eps)
    return BiorthPair(psi_p, psi_m, phi_p, phi_m, eps)


def is_exceptional(p: PauliParams, tol: float = EP_TOL) -> bool:
    """True on the lines beta = 0, gamma = +-alpha, excluding the origin."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return (
        abs(p.beta) <= tol
        and abs(abs(p.gamma) - abs(p.alpha)) <= tol
        and max(abs(p.alpha), abs(p.gamma)) > tol
    )


def el_distance(x, per_line: bool = False):
    """Euclidean distance from points to the two exceptional lines.

    With ``per_line`` the result has a trailing axis of length 2 ordered
    (gamma = +alpha, gamma = -alpha); otherwise the minimum is returned.
    """
    x = np.asarray(x, dtype=float)
    along = x @ EL_DIRECTIONS.T
    perp = x[..., None, :] - along[..., :, None] * EL_DIRECTIONS
    d = np.linalg.norm(perp, axis=-1)
    return d if per_line else d.min(axis=-1)


def chiral_anticommutator(p: PauliParams) -> np.ndarray:
    """``sz H sz + H``; identically zero for this family."""
    h = p.matrix()
    return SIGMA_Z @ h @ SIGMA_Z + h


def _unit_axis(axis, tol: float = 1e-12) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > tol:
        raise BadAxis(f"rotation axis must be a unit 3-vector, got {axis!r}")
    return n


def rotation_matrix(axis, theta: float) -> np.ndarray:
    """SO(3) rotation about ``axis`` by ``theta`` (Rodrigues formula)."""
    n = _unit_axis(axis)
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + math.sin(theta) * k + (1 - math.cos(theta)) * (k @ k)


def su2(axis, theta: float) -> np.ndarray:
    """``exp(-i (n . sigma) theta / 2)``."""
    n = _unit_axis(axis)
    ns = np.tensordot(n, PAULI, axes=1)
    return math.cos(theta / 2) * IDENTITY - 1j * math.sin(theta / 2) * ns


def spin_rotate(p: PauliParams, axis, theta: float) -> PauliVector3:
    """Pauli coefficients of ``U H U^-1`` for ``U = su2(axis, theta)``.

    Conjugation by U acts on the coefficient vector ``(alpha, beta + i gamma, 0)``
    as the classical rotation about the same axis.
    """
    b = rotation_matrix(axis, theta) @ p.pauli_vector().as_array()
    return PauliVector3(*(complex(v) for v in b))
