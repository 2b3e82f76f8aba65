"""JSON loop documents and the bundled reference loops.

A loop document is a JSON object::

    {"schema_version": 1, "kind": "circle", "space": "rm",
     "center": [lambda, Delta, delta], "normal": [...], "radius": r,
     "samples": 4096, "orientation": 1}

or ``"kind": "polyline"`` with ``"vertices": [[x, y, z], ...]`` (closed,
first vertex repeated last) and an optional ``"samples"`` subdivision count.
Coordinates are (beta, gamma, alpha) for ``space = "pauli"`` and
(lambda, Delta, delta) for ``space = "rm"``. Optional keys: ``name``,
``description``, ``expected_coefficient``, ``model`` (``{"j0", "n_cells"}``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
import json
import math
from pathlib import Path

from .errors import InvalidLoop
from .paths import ClosedPath, circle, polyline

__all__ = ["SCHEMA_VERSION", "LoopSpec", "bundled_loop", "bundled_names", "load_loop"]

SCHEMA_VERSION = 1
MIN_CIRCLE_SAMPLES = 64
_PACKAGE = "nhvortex.data.loops"


def _vec3(value, name: str) -> tuple[float, float, float]:
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise InvalidLoop(f"{name} must be a list of three numbers") from exc
    if len(out) != 3 or not all(math.isfinite(v) for v in out):
        raise InvalidLoop(f"{name} must hold three finite numbers, got {value!r}")
    return out


@dataclass(frozen=True)
class LoopSpec:
    kind: str
    space: str
    center: tuple[float, float, float] | None = None
    normal: tuple[float, float, float] | None = None
    radius: float | None = None
    samples: int | None = None
    orientation: int = 1
    vertices: tuple[tuple[float, float, float], ...] | None = None
    name: str | None = None
    description: str | None = None
    expected_coefficient: int | None = None
    model: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.space not in ("pauli", "rm"):
            raise InvalidLoop(f"space must be 'pauli' or 'rm', got {self.space!r}")
        if self.kind == "circle":
            if self.center is None or self.normal is None or self.radius is None or self.samples is None:
                raise InvalidLoop("circle needs center, normal, radius and samples")
            object.__setattr__(self, "center", _vec3(self.center, "center"))
            object.__setattr__(self, "normal", _vec3(self.normal, "normal"))
            if not all(math.isfinite(v) for v in self.normal) or not any(self.normal):
                raise InvalidLoop("normal vector vanishes")
            if not (math.isfinite(self.radius) and self.radius > 0):
                raise InvalidLoop(f"radius must be positive and finite, got {self.radius}")
            if int(self.samples) != self.samples or self.samples < MIN_CIRCLE_SAMPLES:
                raise InvalidLoop(f"circle samples must be an integer >= {MIN_CIRCLE_SAMPLES}")
            if self.orientation not in (1, -1):
                raise InvalidLoop("orientation must be +1 or -1")
        elif self.kind == "polyline":
            if self.vertices is None or len(self.vertices) < 4:
                raise InvalidLoop("polyline needs at least three distinct vertices plus the closing one")
            verts = tuple(_vec3(v, "vertex") for v in self.vertices)
            if verts[0] != verts[-1]:
                raise InvalidLoop("polyline is not closed (first vertex != last vertex)")
            object.__setattr__(self, "vertices", verts)
        else:
            raise InvalidLoop(f"kind must be 'circle' or 'polyline', got {self.kind!r}")

    def to_path(self, samples: int | None = None) -> ClosedPath:
        """Sampled loop; ``samples`` overrides the document's count."""
        n = self.samples if samples is None else samples
        if self.kind == "circle":
            return circle(self.center, self.normal, self.radius, int(n), self.orientation)
        return polyline(self.vertices, n)

    def with_samples(self, samples: int) -> LoopSpec:
        return replace(self, samples=samples)

    def to_dict(self) -> dict:
        doc = {"schema_version": SCHEMA_VERSION, "kind": self.kind, "space": self.space}
        if self.name is not None:
            doc["name"] = self.name
        if self.description is not None:
            doc["description"] = self.description
        if self.kind == "circle":
            doc.update(
                center=list(self.center),
                normal=list(self.normal),
                radius=self.radius,
                samples=self.samples,
                orientation=self.orientation,
            )
        else:
            doc["vertices"] = [list(v) for v in self.vertices]
            if self.samples is not None:
                doc["samples"] = self.samples
        if self.model:
            doc["model"] = dict(self.model)
        if self.expected_coefficient is not None:
            doc["expected_coefficient"] = self.expected_coefficient
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> LoopSpec:
        if not isinstance(doc, dict):
            raise InvalidLoop("loop document must be a JSON object")
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise InvalidLoop(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known - {"schema_version"}
        if extra:
            raise InvalidLoop(f"unknown keys in loop document: {sorted(extra)}")
        kwargs = {k: v for k, v in doc.items() if k != "schema_version"}
        for key in ("kind", "space"):
            if key not in kwargs:
                raise InvalidLoop(f"loop document lacks '{key}'")
        if "vertices" in kwargs:
            kwargs["vertices"] = tuple(tuple(v) for v in kwargs["vertices"])
        if kwargs.get("radius") is not None:
            kwargs["radius"] = float(kwargs["radius"])
        return cls(**kwargs)

    @classmethod
    def loads(cls, text: str) -> LoopSpec:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidLoop(f"loop document is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


def bundled_names() -> list[str]:
    files = resources.files(_PACKAGE).iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def bundled_loop(name: str) -> LoopSpec:
    res = resources.files(_PACKAGE).joinpath(f"{name}.json")
    if not res.is_file():
        raise InvalidLoop(f"no bundled loop named {name!r}; available: {bundled_names()}")
    return LoopSpec.loads(res.read_text())


def load_loop(ref: str) -> LoopSpec:
    """Read a loop document from a file path, or a bundled loop by name."""
    path = Path(ref)
    if path.is_file():
        return LoopSpec.loads(path.read_text())
    if path.suffix == "" and "/" not in ref:
        return bundled_loop(ref)
    raise InvalidLoop(f"loop file {ref!r} not found")
