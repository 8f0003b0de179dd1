"""Ready-made scenes.

Single-pixel scenes look along +x from the origin and place occluders
relative to the cone's footprint, so a front surface covers an exact fraction
of the cross section. Grid scenes fill the monitor's benchmark images.
"""
import math
from typing import Callable, Dict, List, Sequence

from scipy.optimize import brentq

from .beam import BeamSpec
from .scene import Scene, plane, porous, rectangle
from ...shared.errors import InvalidArgumentError

FACING = (-1.0, 0.0, 0.0)
OCCLUDER_SPAN = 50.0


def segment_fraction(h: float) -> float:
    """Area fraction of the unit disk beyond a chord at signed distance h from the center."""
    return (math.acos(h) - h * math.sqrt(1.0 - h * h)) / math.pi


def chord_offset(fraction: float) -> float:
    """Signed chord distance (unit disk) that leaves ``fraction`` of the area beyond it."""
    if not 0.0 < fraction < 1.0:
        raise InvalidArgumentError(f"occluded fraction must be in (0, 1), got {fraction}")
    return brentq(lambda h: segment_fraction(h) - fraction, -1.0, 1.0, xtol=1e-15)


def _cover(distance: float, fraction: float, half_angle: float, above: bool, reflectivity: float, name: str):
    """Half-plane rectangle at x = distance covering ``fraction`` of the footprint, from above or below."""
    edge = chord_offset(fraction) * distance * math.tan(half_angle)
    center_z = edge + OCCLUDER_SPAN if above else -edge - OCCLUDER_SPAN
    extents = (OCCLUDER_SPAN, OCCLUDER_SPAN)
    return rectangle((distance, 0.0, center_z), FACING, (0.0, 1.0, 0.0), extents, reflectivity, name)


def wall_scene(distance: float = 10.0, reflectivity: float = 0.8, seed: int = 0) -> Scene:
    return Scene((plane((distance, 0.0, 0.0), FACING, reflectivity, "wall"),), seed)


def occluder_scene(
    fraction: float,
    near: float = 5.0,
    far: float = 10.0,
    half_angle: float = BeamSpec.half_angle,
    reflectivity: float = 0.8,
    seed: int = 0,
) -> Scene:
    """A front rectangle hiding ``fraction`` of the cone from a full backplane."""
    return Scene(
        (
            _cover(near, fraction, half_angle, True, reflectivity, "occluder"),
            plane((far, 0.0, 0.0), FACING, reflectivity, "back"),
        ),
        seed,
    )


def split_scene(near: float = 5.0, far: float = 10.0, half_angle: float = BeamSpec.half_angle, seed: int = 0) -> Scene:
    """Two surfaces sharing the cone 50/50."""
    return occluder_scene(0.5, near, far, half_angle, seed=seed)


def three_surface_scene(
    fractions: Sequence[float] = (0.2, 0.3),
    distances: Sequence[float] = (5.0, 7.5, 10.0),
    half_angle: float = BeamSpec.half_angle,
    reflectivity: float = 0.8,
    seed: int = 0,
) -> Scene:
    """Near occluder from above, middle occluder from below, backplane behind both."""
    top, bottom = fractions
    if top + bottom >= 1.0:
        raise InvalidArgumentError(f"occluded fractions {fractions} must leave part of the backplane visible")
    near, middle, far = distances
    return Scene(
        (
            _cover(near, top, half_angle, True, reflectivity, "near"),
            _cover(middle, bottom, half_angle, False, reflectivity, "middle"),
            plane((far, 0.0, 0.0), FACING, reflectivity, "back"),
        ),
        seed,
    )


def window_scene(
    glass: float = 6.0,
    wall: float = 10.0,
    hit_probability: float = 0.3,
    glass_reflectivity: float = 0.5,
    wall_reflectivity: float = 0.8,
    seed: int = 0,
) -> Scene:
    """A partly transparent pane in front of an interior wall."""
    return Scene(
        (
            porous((glass, 0.0, 0.0), FACING, hit_probability, glass_reflectivity, "glass"),
            plane((wall, 0.0, 0.0), FACING, wall_reflectivity, "wall"),
        ),
        seed,
    )


def foliage_scene(seed: int = 0) -> Scene:
    """A sparse screen of leaves in front of a wall."""
    return Scene(
        (
            porous((8.0, 0.0, 0.0), FACING, 0.4, 0.3, "foliage"),
            plane((9.5, 0.0, 0.0), FACING, 0.6, "wall"),
        ),
        seed,
    )


def corner_scene(
    distance: float = 12.0, interior_angle_deg: float = 140.0, reflectivity: float = 0.8, seed: int = 0
) -> Scene:
    """Two walls meeting in a vertical crease straight ahead, opening toward the sensor."""
    half = math.radians(interior_angle_deg) / 2.0
    left = (math.sin(half), math.cos(half), 0.0)
    right = (math.sin(half), -math.cos(half), 0.0)
    crease = (distance, 0.0, 0.0)
    walls = (plane(crease, _facing(left), reflectivity, "left"), plane(crease, _facing(right), reflectivity, "right"))
    return Scene(walls, seed)


def _facing(normal):
    return tuple(-c for c in normal)


def retroreflector_scene(distance: float = 15.0, reflectivity: float = 1.8, seed: int = 0) -> Scene:
    """A sign whose reflectance exceeds the Lambertian scale."""
    return Scene((plane((distance, 0.0, 0.0), FACING, reflectivity, "sign"),), seed)


def benchmark_spec(**overrides) -> BeamSpec:
    """40 x 64 grid of 0.25 deg pixels; column 32 looks straight ahead."""
    params = dict(rows=40, cols=64, elev_start=-4.875, elev_step=0.25, az_start=-8.0, az_step=0.25)
    params.update(overrides)
    return BeamSpec(**params)


PRESETS: Dict[str, Callable[..., Scene]] = {
    "wall": wall_scene,
    "split": split_scene,
    "occluder": lambda seed=0: occluder_scene(0.3, seed=seed),
    "three-surface": three_surface_scene,
    "window": window_scene,
    "foliage": foliage_scene,
    "corner": corner_scene,
    "retroreflector": retroreflector_scene,
}


def preset(name: str, seed: int = 0) -> Scene:
    """Scene registered under ``name`` with the given seed."""
    try:
        factory = PRESETS[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return factory(seed=seed)


def benchmark_scenes(seed: int = 0) -> List[Scene]:
    """Wall, window, foliage, corner and split scenes for grading the monitor.

    On the benchmark grid the split scene's edge runs between rows 19 and 20.
    """
    return [
        wall_scene(seed=seed),
        window_scene(seed=seed),
        foliage_scene(seed=seed),
        corner_scene(seed=seed),
        split_scene(seed=seed),
    ]
