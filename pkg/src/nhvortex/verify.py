"""Seeded property suite and random admissible loop generators.

Every property returns its worst residual over the random sample; a
property passes when that residual is below its threshold. The suite is
deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import core2x2, rm
from .berry import (
    PauliModel,
    RotatedPauliModel,
    berry_phase_line_integral,
    berry_phase_wilson,
    connection_numeric,
    quantize,
)
from .core2x2 import PauliParams
from .paths import ClosedPath, circle, polyline
from .vortex import gauge_residual_loop, pauli_filaments, predict_from_filaments

__all__ = [
    "DEFAULT_THRESHOLDS",
    "PropertyResult",
    "format_report",
    "random_pauli_loops",
    "random_rm_loops",
    "random_rm_points",
    "random_rotations",
    "run_suite",
    "wilson_mismatch",
]

DEFAULT_THRESHOLDS = {
    "quantization": 1e-4,
    "predictor_mismatch": 0.5,
    "wilson_agreement": 1e-4,
    "gauge_residual": 1e-4,
    "rm_cancellation": 1e-8,
    "rm_reduction": 1e-8,
    "rm_decomposition": 1e-4,
    "rm_quantization": 1e-4,
    "rotation_invariance": 1e-10,
    "real_spectrum_mismatch": 0.5,
}


@dataclass(frozen=True)
class PropertyResult:
    name: str
    cases: int
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.threshold


def _random_unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _random_polygon(rng, center, normal, radius, samples):
    u = np.cross(normal, _random_unit(rng))
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    k = int(rng.integers(3, 7))
    ang = np.sort(rng.uniform(0, 2 * math.pi, k))
    rad = radius * rng.uniform(0.6, 1.4, k)
    verts = center + rad[:, None] * (np.cos(ang)[:, None] * u + np.sin(ang)[:, None] * v)
    return polyline(np.vstack([verts, verts[:1]]), samples)


def random_pauli_loops(rng, count: int, samples: int = 4096, margin: float = 0.1) -> list[ClosedPath]:
    """Circles and polygons in (beta, gamma, alpha)-space at least ``margin`` from both ELs.

    Half of the loops are centred near a point of one exceptional line so
    that nonzero windings are common.
    """
    model = PauliModel()
    loops = []
    while len(loops) < count:
        if rng.random() < 0.5:
            center = rng.uniform(-2, 2, 3)
        else:
            direction = core2x2.EL_DIRECTIONS[int(rng.integers(2))]
            center = rng.uniform(-2, 2) * direction + rng.normal(scale=0.2, size=3)
        normal = _random_unit(rng)
        radius = rng.uniform(0.2, 2.0)
        if rng.random() < 0.5:
            path = circle(center, normal, radius, samples, orientation=int(rng.choice([1, -1])))
        else:
            path = _random_polygon(rng, center, normal, radius, samples)
        if model.el_distance(path.points).min() >= margin:
            loops.append(path)
    return loops


def random_rm_loops(rng, j0: float, n_cells: int, count: int, samples: int = 2048, margin: float = 0.05):
    """Circles in (lambda, Delta, delta)-space around random boundary-filament points."""
    model = rm.RmModel(j0, n_cells)
    filaments = rm.boundary_filaments(j0)
    loops = []
    while len(loops) < count:
        f = filaments[int(rng.integers(len(filaments)))]
        center = np.asarray(f.anchor) + rng.uniform(-2.5, 2.5) * np.asarray(f.direction)
        center = center + rng.normal(scale=0.2, size=3)
        path = circle(center, _random_unit(rng), rng.uniform(0.1, 0.8), samples)
        if model.el_distance(path.points).min() >= margin:
            loops.append(path)
    return loops


def random_rm_points(rng, j0: float, n_cells: int, count: int, margin: float = 0.05) -> np.ndarray:
    """Points in ``[-1, 1] x [-2, 2] x [-2, 2]`` of (lambda, Delta, delta) off every EL."""
    model = rm.RmModel(j0, n_cells)
    out = np.empty((0, 3))
    while len(out) < count:
        pts = rng.uniform([-1.0, -2.0, -2.0], [1.0, 2.0, 2.0], size=(4 * count, 3))
        ok = model.el_distance(pts) >= margin
        # the printed interior coefficients are also singular at eps_k = i Delta + lambda
        for k in model.ks:
            if rm._mode_kind(k) == "interior":
                eps = core2x2.branch_sqrt(rm._eps_sq(j0, pts, k))
                m = pts[:, 0] + 1j * pts[:, 1]
                ok &= np.minimum(np.abs(eps - m), np.abs(eps + m)) >= margin
        out = np.vstack([out, pts[ok]])
    return out[:count]


def random_rotations(rng, count: int):
    """Triples (PauliParams, unit axis, angle) with parameters off the ELs."""
    out = []
    while len(out) < count:
        p = PauliParams.from_point(rng.uniform(-2, 2, 3))
        if core2x2.el_distance(p.point) < 0.1:
            continue
        out.append((p, _random_unit(rng), float(rng.uniform(0, 2 * math.pi))))
    return out


def wilson_mismatch(path: ClosedPath, field=None) -> float:
    """|line integral - Wilson phase| with the real part compared modulo 2 pi."""
    field = PauliModel() if field is None else field
    line = berry_phase_line_integral(field, path)
    wil = berry_phase_wilson(field, path).phase
    d = line - wil
    re = abs(math.remainder(d.real, 2 * math.pi))
    return max(re, abs(d.imag))


def _quantization_residual(phase: complex) -> float:
    q = quantize(phase, strict=False)
    return max(q.residual, abs(complex(phase).imag))


def run_suite(seed: int = 42, thresholds: dict | None = None, size: int = 20) -> list[PropertyResult]:
    """Run every property with a seeded generator.

    ``thresholds`` overrides entries of :data:`DEFAULT_THRESHOLDS`; ``size``
    scales the number of random cases.
    """
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    rng = np.random.default_rng(seed)
    results = []

    loops = random_pauli_loops(rng, size)
    model = PauliModel()
    filaments = pauli_filaments()
    quant, mismatch, wilson, gauge = [], [], [], []
    for path in loops:
        phase = berry_phase_line_integral(model, path)
        quant.append(_quantization_residual(phase))
        predicted, _ = predict_from_filaments(filaments, path)
        mismatch.append(abs(quantize(phase, strict=False).coefficient - round(predicted / (math.pi / 2))))
        wilson.append(wilson_mismatch(path, model))
        gauge.append(abs(gauge_residual_loop(path)))
    results += [
        PropertyResult("quantization", len(loops), max(quant), th["quantization"]),
        PropertyResult("predictor_mismatch", len(loops), float(max(mismatch)), th["predictor_mismatch"]),
        PropertyResult("wilson_agreement", len(loops), max(wilson), th["wilson_agreement"]),
        PropertyResult("gauge_residual", len(loops), max(gauge), th["gauge_residual"]),
    ]

    j0, n_cells = 1.0, 8
    pts = random_rm_points(rng, j0, n_cells, 5 * size)
    per_mode = {float(k): rm._mode_connection(j0, pts, k) for k in rm.k_grid(n_cells)}
    canc = 0.0
    for k, a in per_mode.items():
        if rm._mode_kind(k) == "interior":
            partner = per_mode[min(per_mode, key=lambda q: abs(q - (2 * math.pi - k)))]
            canc = max(canc, float(np.linalg.norm(a + partner, axis=1).max()))
    total = sum(per_mode[float(k)] for k in rm.k_grid(n_cells))
    closed = rm.RmModel(j0, n_cells).closed_form(pts)
    red = float(np.linalg.norm(total - closed, axis=1).max())
    results += [
        PropertyResult("rm_cancellation", len(pts), canc, th["rm_cancellation"]),
        PropertyResult("rm_reduction", len(pts), red, th["rm_reduction"]),
    ]

    rm_loops = random_rm_loops(rng, j0, n_cells, max(2, size // 4))
    decomp, rq = [], []
    params = rm.RmParams(j0, 0.0, 0.0, 0.0, n_cells)
    for path in rm_loops:
        for which in ("zero", "pi"):
            field = rm.BoundaryResidualField(j0, n_cells, which)
            decomp.append(abs(berry_phase_line_integral(field, path)))
        res = rm.rm_berry_phase(path, params)
        rq.append(max(_quantization_residual(res.phase), abs(res.coefficient - round(res.predicted / (math.pi / 2)))))
    results += [
        PropertyResult("rm_decomposition", len(rm_loops), max(decomp), th["rm_decomposition"]),
        PropertyResult("rm_quantization", len(rm_loops), max(rq), th["rm_quantization"]),
    ]

    rot = []
    for p, axis, theta in random_rotations(rng, size):
        rot.append(rotation_residual(p, axis, theta))
    results.append(PropertyResult("rotation_invariance", size, max(rot), th["rotation_invariance"]))

    bad = sum(real_spectrum_mismatch(p) for p in random_rm_params(rng, 5 * size))
    results.append(PropertyResult("real_spectrum_mismatch", 5 * size, float(bad), th["real_spectrum_mismatch"]))
    return results


def rotation_residual(p: PauliParams, axis, theta: float) -> float:
    """Change of spectrum and numeric connection under ``H -> U H U^-1``.

    Both connections use the same stencil; the rotated one is gauge-fixed to
    ``U e2`` so that only the rotation itself can make them differ.
    """
    rotated = RotatedPauliModel(axis, theta)
    e0 = np.sort_complex(np.linalg.eigvals(p.matrix()))
    e1 = np.sort_complex(np.linalg.eigvals(rotated.hamiltonian(p.point)))
    a0 = connection_numeric(PauliModel(), p.point)
    a1 = connection_numeric(rotated, p.point, gauge_ref=rotated.gauge_ref)
    return float(max(np.abs(e0 - e1).max(), np.abs(a0 - a1).max()))


def random_rm_params(rng, count: int, n_choices=(4, 8, 24)) -> list[rm.RmParams]:
    """Random lattice parameters, half of them with lambda = 0.

    Points whose smallest bracket is within 1e-3 of zero are skipped; there
    the spectrum sits on an EP and realness is numerically ambiguous.
    """
    out = []
    while len(out) < count:
        lam = 0.0 if rng.random() < 0.5 else float(rng.uniform(-1, 1))
        p = rm.RmParams(
            j0=float(rng.uniform(0.5, 1.5)),
            delta_hop=float(rng.uniform(-2, 2)),
            lam=lam,
            big_delta=float(rng.uniform(-2, 2)),
            n_cells=int(rng.choice(n_choices)),
        )
        if np.abs(rm.brackets(p)).min() < 1e-3:
            continue
        out.append(p)
    return out


def real_spectrum_mismatch(p: rm.RmParams, tol: float = 1e-7) -> bool:
    """Whether the flag disagrees with a direct real-space diagonalization."""
    evals = np.linalg.eigvals(rm.real_space_hamiltonian(p))
    return rm.real_spectrum_check(p) != bool(np.abs(evals.imag).max() < tol)


def format_report(results: list[PropertyResult], seed: int) -> str:
    lines = [f"seed {seed}", f"{'property':<24} {'cases':>6} {'max_residual':>14} {'threshold':>10}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<24} {r.cases:>6d} {r.max_residual:>14.6e} {r.threshold:>10.3e}  {status}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} properties passed")
    return "\n".join(lines) + "\n"
