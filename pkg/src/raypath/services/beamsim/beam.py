"""Diverging-cone pulse model.

A pulse is a bundle of M sub-rays spread uniformly over the cone's cross
section. Each sub-ray stops at the first surface that does not let it pass.
Sub-ray hits are grouped per surface, and the detector reports one group:
under ``strongest`` a group is drawn with probability proportional to its
returned power, under ``last`` the farthest group wins.
"""
import math
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .scene import Scene
from ...core.frames import (
    ABSENT,
    NO_RETURN,
    Calibration,
    FrameSequence,
    NeighborhoodSpec,
    RangeImage,
    RaypathId,
    Return,
    check_spec,
    neighborhood_ranges,
)
from ...core.mixture import DEFAULT_MIN_GAP
from ...shared.errors import InvalidArgumentError, UnsupportedSceneError
from ...utils.rng import pixel_rng

logger = logging.getLogger(__name__)

STRONGEST = "strongest"
LAST = "last"
POLICIES = (STRONGEST, LAST)
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
DEFAULT_LABEL_SUBRAYS = 256
DEFAULT_DENSE_SUBRAYS = 100_000


@dataclass
class BeamSpec:
    """Sensor model: pixel grid, origin, cone half-angle, sub-ray count, range noise and detector policy."""
    rows: int = 1
    cols: int = 1
    elev_start: float = 0.0
    elev_step: float = 0.25
    az_start: float = 0.0
    az_step: float = 0.25
    origin: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    half_angle: float = 0.0015
    subrays: int = 64
    range_noise: float = 0.02
    policy: str = STRONGEST
    rate_hz: float = 10.0

    def __post_init__(self):
        self.origin = tuple(float(v) for v in self.origin)
        if len(self.origin) != 3:
            raise InvalidArgumentError(f"origin must have three coordinates, got {self.origin}")
        if not self.half_angle > 0 or self.half_angle >= math.pi / 2:
            raise InvalidArgumentError(f"half_angle must be in (0, pi/2) radians, got {self.half_angle}")
        if self.subrays < 1 or self.rows < 1 or self.cols < 1:
            raise InvalidArgumentError("subrays, rows and cols must be >= 1")
        if not self.range_noise >= 0:
            raise InvalidArgumentError(f"range_noise must be >= 0, got {self.range_noise}")
        if self.policy not in POLICIES:
            raise InvalidArgumentError(f"policy must be one of {', '.join(POLICIES)}, got {self.policy!r}")

    @property
    def calibration(self) -> Calibration:
        return Calibration(self.elev_start, self.elev_step, self.az_start, self.az_step)

    @classmethod
    def from_dict(cls, data: dict) -> 'BeamSpec':
        """Create a BeamSpec instance from a dictionary."""
        valid_keys = cls.__dataclass_fields__.keys()
        filtered_data = {k: v for k, v in data.items() if k in valid_keys}
        return cls(**filtered_data)


class Echo(NamedTuple):
    """A detected (or missing) return together with the surface that produced it."""

    range: float
    reflectance: Optional[float]
    surface: int

    @property
    def is_return(self) -> bool:
        return self.surface >= 0

    def to_return(self) -> Return:
        return Return(self.range, self.reflectance)


NO_ECHO = Echo(NO_RETURN, None, -1)


def _basis(axis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``axis`` to a right-handed frame."""
    up = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(axis, up)) > 0.9:
        up = np.array([0.0, 1.0, 0.0])
    right = np.cross(axis, up)
    right /= np.linalg.norm(right)
    return right, np.cross(right, axis)


def subray_directions(axis, half_angle: float, radii: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Unit sub-ray directions for cross-section points given in polar form on the unit disk."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    e1, e2 = _basis(axis)
    spread = math.tan(half_angle) * radii
    dirs = axis + spread[:, None] * (np.cos(angles)[:, None] * e1 + np.sin(angles)[:, None] * e2)
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def sunflower(count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Deterministic, evenly spread points on the unit disk (radii, angles)."""
    k = np.arange(count, dtype=np.float64)
    return np.sqrt((k + 0.5) / count), k * GOLDEN_ANGLE


def _first_hits(scene: Scene, origin: np.ndarray, dirs: np.ndarray, stopped: np.ndarray):
    """Index of the first stopping surface per sub-ray (-1 for none) and its distance."""
    t = np.where(stopped, scene.distances(origin, dirs), np.inf)
    idx = np.argmin(t, axis=1)
    dist = t[np.arange(t.shape[0]), idx]
    idx[~np.isfinite(dist)] = -1
    return idx, dist


def _groups(scene: Scene, dirs: np.ndarray, idx: np.ndarray, dist: np.ndarray):
    """Per-surface hit count, mean hit distance and returned power (reflectivity * |cos incidence|)."""
    hit = idx >= 0
    n = len(scene)
    cosines = np.abs(np.einsum("mk,mk->m", dirs[hit], scene.normals[idx[hit]]))
    power = np.bincount(idx[hit], weights=scene.reflectivity[idx[hit]] * cosines, minlength=n)
    counts = np.bincount(idx[hit], minlength=n)
    sums = np.bincount(idx[hit], weights=dist[hit], minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_range = np.where(counts > 0, sums / counts, np.nan)
    return counts, mean_range, power


def _last_group(mean_range: np.ndarray, power: np.ndarray) -> int:
    candidates = np.flatnonzero(power > 0)
    return int(candidates[np.argmax(mean_range[candidates])])


def trace_beam(scene: Scene, axis, spec: BeamSpec, rng: np.random.Generator) -> Echo:
    """Fire one pulse along ``axis`` and report the echo with the surface that produced it.

    Every pulse draws the same amount of randomness in the same order, so the
    stream position does not depend on the scene.
    """
    m, n = spec.subrays, len(scene)
    radii = np.sqrt(rng.random(m))
    angles = 2.0 * math.pi * rng.random(m)
    passes = rng.random((m, n))
    choice = rng.random()
    noise = rng.standard_normal()
    if n == 0:
        return NO_ECHO

    origin = np.asarray(spec.origin, dtype=np.float64)
    dirs = subray_directions(axis, spec.half_angle, radii, angles)
    idx, dist = _first_hits(scene, origin, dirs, passes < scene.hit_probability[None, :])
    counts, mean_range, power = _groups(scene, dirs, idx, dist)
    total = float(power.sum())
    if not total > 0:
        return NO_ECHO
    if spec.policy == STRONGEST:
        surface = int(np.searchsorted(np.cumsum(power), choice * total, side="right"))
        surface = min(surface, n - 1)
    else:
        surface = _last_group(mean_range, power)
    r = max(float(mean_range[surface]) + spec.range_noise * noise, 0.0)
    return Echo(r, 100.0 * float(power[surface]) / m, surface)


def cast_beam(scene: Scene, axis, spec: BeamSpec, rng: np.random.Generator) -> Return:
    """Fire one pulse along ``axis``; the reported range or NO_RETURN with reflectance."""
    return trace_beam(scene, axis, spec, rng).to_return()


def analytic_cluster_weights(
    scene: Scene, axis, spec: BeamSpec, dense_subrays: int = DEFAULT_DENSE_SUBRAYS
) -> np.ndarray:
    """Expected selection probability of every surface, by dense quadrature over the cone.

    Range noise plays no part. Only opaque scenes have a closed form here.

    Returns:
        np.ndarray: One weight per scene surface (zeros for surfaces never reported)

    Raises:
        UnsupportedSceneError: If the scene contains a porous screen
    """
    if scene.has_porous:
        raise UnsupportedSceneError("analytic weights need opaque surfaces only")
    radii, angles = sunflower(dense_subrays)
    dirs = subray_directions(axis, spec.half_angle, radii, angles)
    stopped = np.ones((dense_subrays, len(scene)), dtype=bool)
    idx, dist = _first_hits(scene, np.asarray(spec.origin, dtype=np.float64), dirs, stopped)
    counts, mean_range, power = _groups(scene, dirs, idx, dist)
    weights = np.zeros(len(scene))
    total = float(power.sum())
    if not total > 0:
        return weights
    if spec.policy == STRONGEST:
        return power / total
    weights[_last_group(mean_range, power)] = 1.0
    return weights


def pixel_surfaces(scene: Scene, axis, spec: BeamSpec, subrays: int = DEFAULT_LABEL_SUBRAYS) -> Dict[int, float]:
    """Surfaces the pixel's cone reaches, each with the mean distance of the sub-rays reaching it.

    A sub-ray reaches every surface up to and including its first opaque one;
    porous screens in front are reached and passed. Range noise plays no part.
    """
    if len(scene) == 0:
        return {}
    radii, angles = sunflower(subrays)
    dirs = subray_directions(axis, spec.half_angle, radii, angles)
    t = scene.distances(np.asarray(spec.origin, dtype=np.float64), dirs)
    opaque = scene.hit_probability == 1.0
    stop = np.min(np.where(opaque[None, :], t, np.inf), axis=1)
    reached = np.isfinite(t) & (t <= stop[:, None])
    return {int(s): float(np.mean(t[reached[:, s], s])) for s in np.flatnonzero(reached.any(axis=0))}


def pixel_label(scene: Scene, axis, spec: BeamSpec, subrays: int = DEFAULT_LABEL_SUBRAYS) -> int:
    """Number of distinct surfaces the pixel's cone reaches."""
    return len(pixel_surfaces(scene, axis, spec, subrays))


def _separated(entries: List[Tuple[int, float]], min_separation: float) -> bool:
    lo: Dict[int, float] = {}
    hi: Dict[int, float] = {}
    for surface, distance in entries:
        lo[surface] = min(lo.get(surface, math.inf), distance)
        hi[surface] = max(hi.get(surface, -math.inf), distance)
    return any(hi[b] - lo[a] > min_separation for a in lo for b in hi if a != b)


def neighborhood_labels(
    scene: Scene,
    spec: BeamSpec,
    patch: NeighborhoodSpec = NeighborhoodSpec(),
    min_separation: float = DEFAULT_MIN_GAP,
    subrays: int = DEFAULT_LABEL_SUBRAYS,
) -> np.ndarray:
    """Ground truth for detectors that judge a raypath by its neighborhood.

    Pixel (i, j) is positive when the cones of its neighborhood (rows clipped,
    columns wrapped, as for spatial CDFs) reach two different surfaces at mean
    distances more than ``min_separation`` apart. Every pixel whose neighborhood
    straddles a hard edge is positive; walls meeting in a continuous crease are not.

    Returns:
        np.ndarray: Boolean R x C grid
    """
    if not min_separation > 0:
        raise InvalidArgumentError(f"min_separation must be positive, got {min_separation}")
    check_spec((spec.rows, spec.cols), patch)
    cal = spec.calibration
    surfaces = [
        list(pixel_surfaces(scene, cal.direction(i, j), spec, subrays).items())
        for i in range(spec.rows)
        for j in range(spec.cols)
    ]
    index = np.arange(spec.rows * spec.cols, dtype=np.float64).reshape(spec.rows, spec.cols)
    labels = np.zeros((spec.rows, spec.cols), dtype=bool)
    for i in range(spec.rows):
        for j in range(spec.cols):
            block, _ = neighborhood_ranges(index, RaypathId(i, j), patch)
            entries = [entry for cell in block.astype(int) for entry in surfaces[cell]]
            labels[i, j] = _separated(entries, min_separation)
    return labels


def simulate_sequence(
    scene: Scene, spec: BeamSpec, frames: int, seed: Optional[int] = None
) -> Tuple[FrameSequence, np.ndarray]:
    """Simulate ``frames`` revolutions over the beam's pixel grid.

    Pixel (i, j) of frame k draws from its own stream derived from
    ``(seed, i, j, k)``; the scene's seed is used when none is given.

    Returns:
        Tuple of (frame sequence with reflectance, boolean R x C grid marking
        pixels whose cone reaches two or more surfaces)
    """
    if frames < 1:
        raise InvalidArgumentError(f"frames must be >= 1, got {frames}")
    seed = scene.seed if seed is None else seed
    cal = spec.calibration
    axes = [[cal.direction(i, j) for j in range(spec.cols)] for i in range(spec.rows)]
    labels = np.array([[pixel_label(scene, axes[i][j], spec) >= 2 for j in range(spec.cols)] for i in range(spec.rows)])

    images = []
    for k in range(frames):
        ranges = np.empty((spec.rows, spec.cols))
        reflectance = np.empty((spec.rows, spec.cols))
        for i in range(spec.rows):
            for j in range(spec.cols):
                echo = trace_beam(scene, axes[i][j], spec, pixel_rng(seed, i, j, k))
                ranges[i, j] = echo.range
                reflectance[i, j] = ABSENT if echo.reflectance is None else echo.reflectance
        images.append(RangeImage(ranges, cal, reflectance))
        logger.debug("simulated frame %d/%d", k + 1, frames)
    return FrameSequence(tuple(images), spec.rate_hz), labels
