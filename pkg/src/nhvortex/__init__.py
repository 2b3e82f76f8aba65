"""Berry phases of non-Hermitian two-band models and their exceptional-line vortices."""

from __future__ import annotations

from .berry import (
    PauliModel,
    berry_phase_line_integral,
    berry_phase_wilson,
    connection_analytic,
    connection_numeric,
    quantize,
)
from .core2x2 import PauliParams, biorth_pair, eigenvalues
from .errors import ModelError
from .loopspec import LoopSpec, bundled_loop, load_loop
from .paths import ClosedPath, circle, polyline
from .rm import RmModel, RmParams, rm_berry_phase
from .vortex import pauli_filaments, predicted_phase, winding_numbers

__version__ = "0.1.0"

__all__ = [
    "ClosedPath",
    "LoopSpec",
    "ModelError",
    "PauliModel",
    "PauliParams",
    "RmModel",
    "RmParams",
    "berry_phase_line_integral",
    "berry_phase_wilson",
    "biorth_pair",
    "bundled_loop",
    "circle",
    "connection_analytic",
    "connection_numeric",
    "eigenvalues",
    "load_loop",
    "pauli_filaments",
    "polyline",
    "predicted_phase",
    "quantize",
    "rm_berry_phase",
    "winding_numbers",
]
