"""Exception types raised by the numerical kernels.

Every error carries a short machine-readable ``code`` so that the CLI can
report it without parsing messages.
"""

from __future__ import annotations


class ModelError(ValueError):
    code = "MODEL_ERROR"


class EPDegenerate(ModelError):
    """Eigenvectors coalesce; a biorthogonal pair does not exist."""

    code = "EP_DEGENERATE"


class EPDivergent(ModelError):
    """A closed-form quantity has a pole at the evaluation point."""

    code = "EP_DIVERGENT"


class EPProximity(ModelError):
    """An evaluation point lies inside the safety margin around an EL."""

    code = "EP_PROXIMITY"

    def __init__(self, message: str, index: int | None = None, distance: float | None = None):
        super().__init__(message)
        self.index = index
        self.distance = distance


class Degenerate(ModelError):
    """Diagonalizable degeneracy (H = 0), distinct from an exceptional point."""

    code = "DEGENERATE"


class BadAxis(ModelError):
    code = "BAD_AXIS"


class TrackingLost(ModelError):
    """Band tracking failed between consecutive loop samples."""

    code = "TRACKING_LOST"


class NotQuantized(ModelError):
    code = "NOT_QUANTIZED"

    def __init__(self, message: str, coefficient: int, residual: float):
        super().__init__(message)
        self.coefficient = coefficient
        self.residual = residual


class OnFilament(ModelError):
    code = "ON_FILAMENT"


class OddN(ModelError):
    code = "ODD_N"


class InvalidLoop(ModelError):
    code = "INVALID_LOOP"
