"""Parametric surfaces for the beam simulator and their JSON scene files."""
import json
import logging
from dataclasses import dataclass, asdict
from functools import cached_property
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ...shared.errors import FormatError, InvalidArgumentError
from ...utils.files import atomic_write_text, dumps_json, read_text

logger = logging.getLogger(__name__)

PLANE = "plane"
RECTANGLE = "rectangle"
POROUS = "porous"
KINDS = (PLANE, RECTANGLE, POROUS)
UNIT_TOLERANCE = 1e-9
MIN_DISTANCE = 1e-9

Vector = Tuple[float, float, float]


def _vector(value, name: str) -> Vector:
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} must be three finite numbers, got {value!r}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class Surface:
    """A plane, a bounded rectangle or a porous screen.

    Rectangles (and bounded porous screens) span ``half_extents`` along
    ``axis`` and along ``normal x axis`` around ``point``. A porous screen
    stops each sub-ray with ``hit_probability`` and lets the rest pass.
    Reflectivity above 1 models a retroreflector.
    """

    kind: str
    point: Vector
    normal: Vector
    reflectivity: float = 0.8
    hit_probability: float = 1.0
    axis: Optional[Vector] = None
    half_extents: Optional[Tuple[float, float]] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"surface kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        object.__setattr__(self, "point", _vector(self.point, "point"))
        object.__setattr__(self, "normal", _vector(self.normal, "normal"))
        if abs(np.linalg.norm(self.normal) - 1.0) > UNIT_TOLERANCE:
            raise InvalidArgumentError(f"normal {self.normal} is not unit length")
        if not self.reflectivity >= 0:
            raise InvalidArgumentError(f"reflectivity must be >= 0, got {self.reflectivity}")
        if not 0.0 < self.hit_probability <= 1.0:
            raise InvalidArgumentError(f"hit_probability must be in (0, 1], got {self.hit_probability}")
        if self.kind != POROUS and self.hit_probability != 1.0:
            raise InvalidArgumentError(f"only porous screens pass sub-rays ({self.kind} has hit_probability < 1)")
        if self.kind == PLANE and (self.axis is not None or self.half_extents is not None):
            raise InvalidArgumentError("an infinite plane takes no axis or extents")
        if self.kind == RECTANGLE and (self.axis is None or self.half_extents is None):
            raise InvalidArgumentError("a rectangle needs an axis and half extents")
        if (self.axis is None) != (self.half_extents is None):
            raise InvalidArgumentError("axis and half_extents go together")
        if self.axis is not None:
            axis = _vector(self.axis, "axis")
            if abs(np.linalg.norm(axis) - 1.0) > UNIT_TOLERANCE or abs(np.dot(axis, self.normal)) > UNIT_TOLERANCE:
                raise InvalidArgumentError(f"axis {axis} must be a unit vector perpendicular to the normal")
            extents = tuple(float(v) for v in self.half_extents)
            if len(extents) != 2 or not all(v > 0 for v in extents):
                raise InvalidArgumentError(f"half_extents must be two positive numbers, got {self.half_extents}")
            object.__setattr__(self, "axis", axis)
            object.__setattr__(self, "half_extents", extents)

    @property
    def bounded(self) -> bool:
        return self.axis is not None

    @property
    def opaque(self) -> bool:
        return self.hit_probability == 1.0

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "Surface":
        valid_keys = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in data.items() if k in valid_keys})


def plane(point, normal, reflectivity: float = 0.8, name: str = "") -> Surface:
    return Surface(PLANE, point, normal, reflectivity, name=name)


def rectangle(point, normal, axis, half_extents, reflectivity: float = 0.8, name: str = "") -> Surface:
    return Surface(RECTANGLE, point, normal, reflectivity, axis=axis, half_extents=half_extents, name=name)


def porous(point, normal, hit_probability: float, reflectivity: float = 0.5, name: str = "") -> Surface:
    return Surface(POROUS, point, normal, reflectivity, hit_probability, name=name)


@dataclass(frozen=True)
class Scene:
    """Surfaces seen by the simulated sensor plus the default simulation seed."""

    surfaces: Tuple[Surface, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "surfaces", tuple(self.surfaces))

    def __len__(self) -> int:
        return len(self.surfaces)

    @property
    def has_porous(self) -> bool:
        return any(s.kind == POROUS or not s.opaque for s in self.surfaces)

    @cached_property
    def _arrays(self):
        points = np.array([s.point for s in self.surfaces], dtype=np.float64).reshape(-1, 3)
        normals = np.array([s.normal for s in self.surfaces], dtype=np.float64).reshape(-1, 3)
        bounded = np.array([s.bounded for s in self.surfaces], dtype=bool)
        axes = np.array([s.axis if s.bounded else (0.0, 0.0, 0.0) for s in self.surfaces]).reshape(-1, 3)
        extents = np.array([s.half_extents if s.bounded else (np.inf, np.inf) for s in self.surfaces]).reshape(-1, 2)
        return points, normals, bounded, axes, np.cross(normals, axes), extents

    @cached_property
    def reflectivity(self) -> np.ndarray:
        return np.array([s.reflectivity for s in self.surfaces], dtype=np.float64)

    @cached_property
    def hit_probability(self) -> np.ndarray:
        return np.array([s.hit_probability for s in self.surfaces], dtype=np.float64)

    @cached_property
    def normals(self) -> np.ndarray:
        return self._arrays[1]

    def distances(self, origin: np.ndarray, dirs: np.ndarray) -> np.ndarray:
        """Distance along each unit direction to each surface, inf where missed.

        Args:
            origin: Shared ray origin, shape (3,)
            dirs: Unit directions, shape (M, 3)

        Returns:
            np.ndarray: (M, S) distances
        """
        points, normals, bounded, axes, binormals, extents = self._arrays
        denom = dirs @ normals.T
        numer = np.sum((points - origin) * normals, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = numer[None, :] / denom
        t[~(np.abs(denom) > 0) | ~(t > MIN_DISTANCE)] = np.inf
        if np.any(bounded):
            with np.errstate(invalid="ignore"):
                rel = origin + t[..., None] * dirs[:, None, :] - points[None, :, :]
                u = np.einsum("msk,sk->ms", rel, axes)
                v = np.einsum("msk,sk->ms", rel, binormals)
                outside = bounded[None, :] & ((np.abs(u) > extents[:, 0]) | (np.abs(v) > extents[:, 1]))
            t[outside] = np.inf
        return t

    def to_dict(self) -> dict:
        return {"seed": self.seed, "surfaces": [s.to_dict() for s in self.surfaces]}

    @classmethod
    def from_dict(cls, data: dict) -> "Scene":
        return cls(tuple(Surface.from_dict(s) for s in data.get("surfaces", [])), int(data.get("seed", 0)))


def load_scene(path: Union[str, Path]) -> Scene:
    """Read a scene JSON file.

    Raises:
        FormatError: If the file is not a valid scene
    """
    try:
        data = json.loads(read_text(path))
        if not isinstance(data, dict) or not isinstance(data.get("surfaces"), list):
            raise FormatError("scene must be an object with a 'surfaces' list")
        scene = Scene.from_dict(data)
    except FormatError:
        raise
    except (ValueError, TypeError) as e:
        raise FormatError(f"invalid scene {path}: {e}")
    logger.debug("loaded scene with %d surfaces from %s", len(scene), path)
    return scene


def save_scene(scene: Scene, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, dumps_json(scene.to_dict()))
