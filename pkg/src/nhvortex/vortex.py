"""Exceptional lines as straight vortex filaments.

The connection of the 2x2 family splits into the Biot-Savart fields of the two
lines beta = 0, gamma = +-alpha plus the gradient of a single-valued scalar.
Loop phases therefore follow from signed winding numbers about the filaments,
pi/2 per unit winding.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
import math

import numpy as np

from .berry import HALF_PI, PauliModel, berry_phase_line_integral, pauli_connection
from .core2x2 import EL_DIRECTIONS, PauliParams
from .errors import OnFilament
from .paths import ClosedPath, wrap_angle

__all__ = [
    "Filament",
    "VortexFieldValue",
    "combined_vortex",
    "curl_fields",
    "fit_scalar_sign",
    "gauge_residual_loop",
    "gauge_scalar",
    "pauli_filaments",
    "predicted_phase",
    "predict_from_filaments",
    "winding_number",
    "winding_numbers",
]

FILAMENT_TOL = 1e-9


@dataclass(frozen=True)
class Filament:
    """Straight line ``anchor + t * direction`` carrying flux ``sign * pi/2``.

    ``direction`` is oriented so that the field of this filament circulates
    counter-clockwise about it; winding numbers are measured the same way.
    """

    anchor: tuple[float, float, float]
    direction: tuple[float, float, float]
    sign: int
    label: str

    def transverse_coords(self, points) -> np.ndarray:
        """Coordinates of ``points`` in the plane orthogonal to the filament.

        The basis ``(e1, e2)`` satisfies ``e1 x e2 = direction``.
        """
        d = np.asarray(self.direction, dtype=float)
        ref = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = ref - (ref @ d) * d
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(d, e1)
        rel = np.asarray(points, dtype=float) - np.asarray(self.anchor, dtype=float)
        return np.stack([rel @ e1, rel @ e2], axis=-1)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["anchor"] = [float(v) for v in self.anchor]
        rec["direction"] = [float(v) for v in self.direction]
        return rec


def pauli_filaments() -> list[Filament]:
    """The two exceptional lines of the 2x2 family in (beta, gamma, alpha)."""
    return [
        Filament((0.0, 0.0, 0.0), tuple(EL_DIRECTIONS[0]), +1, "gamma=+alpha"),
        Filament((0.0, 0.0, 0.0), tuple(EL_DIRECTIONS[1]), -1, "gamma=-alpha"),
    ]


@dataclass(frozen=True)
class VortexFieldValue:
    a_plus: np.ndarray
    a_minus: np.ndarray
    d_plus: float
    d_minus: float


def _curl_fields(x):
    x = np.asarray(x, dtype=float)
    beta, gamma, alpha = x[..., 0], x[..., 1], x[..., 2]
    d_plus = (gamma + alpha) ** 2 + beta**2
    d_minus = (gamma - alpha) ** 2 + beta**2
    a_plus = np.stack([-gamma + alpha, beta, -beta], axis=-1) / (4 * d_minus[..., None])
    a_minus = np.stack([-gamma - alpha, beta, beta], axis=-1) / (4 * d_plus[..., None])
    return a_plus, a_minus, d_plus, d_minus


def curl_fields(p: PauliParams, tol: float = FILAMENT_TOL) -> VortexFieldValue:
    """Biot-Savart fields of the two filaments at ``p``, ordered (beta, gamma, alpha)."""
    beta, gamma, alpha = p.point
    if min((gamma + alpha) ** 2 + beta**2, (gamma - alpha) ** 2 + beta**2) <= tol:
        raise OnFilament(f"{p} lies on an exceptional line")
    a_plus, a_minus, d_plus, d_minus = _curl_fields(p.point)
    return VortexFieldValue(a_plus, a_minus, float(d_plus), float(d_minus))


def combined_vortex_field(x) -> np.ndarray:
    """Vectorized ``a_plus - a_minus``."""
    a_plus, a_minus, _, _ = _curl_fields(x)
    return a_plus - a_minus


def combined_vortex(p: PauliParams, tol: float = FILAMENT_TOL) -> np.ndarray:
    v = curl_fields(p, tol)
    return v.a_plus - v.a_minus


def gauge_scalar(x, sign: int = -1) -> np.ndarray:
    """Scalar ``chi = sign * (i/8) ln(D_minus / D_plus)``.

    With ``sign=-1`` (the value fixed by :func:`fit_scalar_sign`) the
    connection equals ``combined_vortex + grad chi`` away from the filaments.
    """
    _, _, d_plus, d_minus = _curl_fields(x)
    return sign * (1j / 8) * np.log(d_minus / d_plus)


def fit_scalar_sign(points, h: float = 1e-5) -> float:
    """Least-squares coefficient ``c`` in ``A - combined = c grad((i/8) ln(D-/D+))``.

    The gradient is taken by central differences at the reference points.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    residual = pauli_connection(points) - combined_vortex_field(points)
    grad = np.empty_like(residual)
    for g in range(3):
        step = np.zeros(3)
        step[g] = h
        grad[:, g] = (gauge_scalar(points + step, 1) - gauge_scalar(points - step, 1)) / (2 * h)
    num = np.vdot(grad.ravel(), residual.ravel())
    den = np.vdot(grad.ravel(), grad.ravel())
    return float((num / den).real)


class ResidualField(PauliModel):
    """Connection minus the combined vortex field; a pure gradient."""

    def connection(self, points) -> np.ndarray:
        return pauli_connection(points) - combined_vortex_field(points)


def gauge_residual_loop(path: ClosedPath, margin: float | None = None) -> complex:
    """Closed-loop integral of ``A - (a_plus - a_minus)``; vanishes for every loop."""
    return berry_phase_line_integral(ResidualField(), path, margin)


def winding_number(filament: Filament, path: ClosedPath, tol: float = FILAMENT_TOL) -> int:
    """Signed winding of the loop's transverse projection about the filament."""
    xy = filament.transverse_coords(path.points)
    r = np.hypot(xy[:, 0], xy[:, 1])
    if r.min() <= tol:
        raise OnFilament(f"loop sample {int(np.argmin(r))} lies on filament {filament.label}")
    ang = np.arctan2(xy[:, 1], xy[:, 0])
    total = math.fsum(wrap_angle(np.diff(ang)))
    return int(round(total / (2 * math.pi)))


def winding_numbers(path: ClosedPath) -> tuple[int, int]:
    """Windings about the gamma = +alpha and gamma = -alpha filaments."""
    plus, minus = pauli_filaments()
    return winding_number(plus, path), winding_number(minus, path)


def predicted_phase(w_plus: int, w_minus: int) -> float:
    return HALF_PI * (w_plus - w_minus)


def predict_from_filaments(filaments, path: ClosedPath) -> tuple[float, list[int]]:
    """Flux prediction ``sum_f sign_f * pi/2 * winding_f`` and the windings."""
    windings = [winding_number(f, path) for f in filaments]
    coef = sum(f.sign * w for f, w in zip(filaments, windings))
    return HALF_PI * coef, windings
