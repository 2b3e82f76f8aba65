"""Closed sampled curves in a 3D real parameter space."""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InvalidLoop

__all__ = ["ClosedPath", "circle", "polyline", "step_bound", "wrap_angle"]

MIN_SAMPLES = 8


@dataclass(frozen=True)
class ClosedPath:
    """Ordered samples of a loop; the first point is repeated at the end.

    Orientation is the sample order.
    """

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidLoop(f"expected an (M, 3) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidLoop("path contains non-finite coordinates")
        if len(pts) - 1 < MIN_SAMPLES:
            raise InvalidLoop(f"need at least {MIN_SAMPLES} samples, got {len(pts) - 1}")
        if np.max(np.abs(pts[0] - pts[-1])) > 1e-12:
            raise InvalidLoop("first and last points differ; path is not closed")
        if np.any(np.linalg.norm(np.diff(pts, axis=0), axis=1) == 0.0):
            raise InvalidLoop("consecutive samples coincide")
        pts = pts.copy()
        pts[-1] = pts[0]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_samples(self) -> int:
        return len(self.points) - 1

    @property
    def vertices(self) -> np.ndarray:
        """Distinct samples (closing point dropped)."""
        return self.points[:-1]

    def steps(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    def max_step(self) -> float:
        return float(np.linalg.norm(self.steps(), axis=1).max())

    def length(self) -> float:
        return float(np.linalg.norm(self.steps(), axis=1).sum())

    def shifted(self, k: int) -> ClosedPath:
        """Same loop started at sample ``k``."""
        v = np.roll(self.vertices, -k, axis=0)
        return ClosedPath(np.vstack([v, v[:1]]))

    def reversed(self) -> ClosedPath:
        return ClosedPath(self.points[::-1].copy())

    def transformed(self, matrix) -> ClosedPath:
        return ClosedPath(self.points @ np.asarray(matrix, dtype=float).T)


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ref = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = ref - (ref @ normal) * normal
    u /= np.linalg.norm(u)
    return u, np.cross(normal, u)


def circle(center, normal, radius: float, samples: int, orientation: int = 1) -> ClosedPath:
    """Circle traversed counter-clockwise about ``normal`` (right-hand rule).

    ``orientation=-1`` reverses the direction. For an axis-aligned normal
    the in-plane basis is the cyclic successor pair, e.g. normal e3 gives
    ``u = e1``, ``v = e2``.
    """
    if orientation not in (1, -1):
        raise InvalidLoop("orientation must be +1 or -1")
    if not radius > 0:
        raise InvalidLoop(f"radius must be positive, got {radius}")
    n = np.asarray(normal, dtype=float)
    norm = np.linalg.norm(n)
    if not norm > 0:
        raise InvalidLoop("normal vector vanishes")
    n = n / norm
    u, v = _plane_basis(n)
    t = orientation * 2 * np.pi * np.arange(samples + 1) / samples
    pts = np.asarray(center, dtype=float) + radius * (np.cos(t)[:, None] * u + np.sin(t)[:, None] * v)
    pts[-1] = pts[0]
    return ClosedPath(pts)


def polyline(vertices, samples: int | None = None) -> ClosedPath:
    """Closed polyline, optionally subdivided to about ``samples`` points.

    Edges receive subdivisions in proportion to their length (at least one).
    """
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) < 4:
        raise InvalidLoop("polyline needs at least three distinct vertices plus the closing one")
    if np.max(np.abs(verts[0] - verts[-1])) > 1e-12:
        raise InvalidLoop("polyline is not closed (first vertex != last vertex)")
    if samples is None:
        return ClosedPath(verts)
    edges = np.diff(verts, axis=0)
    lengths = np.linalg.norm(edges, axis=1)
    counts = np.maximum(1, np.round(samples * lengths / lengths.sum()).astype(int))
    pieces = []
    for start, edge, m in zip(verts[:-1], edges, counts):
        frac = np.arange(m)[:, None] / m
        pieces.append(start + frac * edge)
    pts = np.vstack(pieces + [verts[:1]])
    return ClosedPath(pts)


def step_bound(path: ClosedPath, factor: float = 10.0) -> float:
    """Default safety margin: ``factor`` times the largest step."""
    return factor * path.max_step()


def wrap_angle(a):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a), 2 * math.pi)
