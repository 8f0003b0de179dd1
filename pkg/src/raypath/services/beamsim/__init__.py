"""Conical-beam lidar simulator: the ground-truth oracle for the analysis modules."""
from .scene import Scene, Surface, plane, rectangle, porous, load_scene, save_scene
from .beam import (
    BeamSpec,
    Echo,
    STRONGEST,
    LAST,
    trace_beam,
    cast_beam,
    analytic_cluster_weights,
    pixel_label,
    pixel_surfaces,
    neighborhood_labels,
    simulate_sequence,
)
from .presets import (
    PRESETS,
    preset,
    wall_scene,
    split_scene,
    occluder_scene,
    three_surface_scene,
    window_scene,
    foliage_scene,
    corner_scene,
    retroreflector_scene,
    benchmark_spec,
    benchmark_scenes,
)

__all__ = [
    'Scene',
    'Surface',
    'plane',
    'rectangle',
    'porous',
    'load_scene',
    'save_scene',
    'BeamSpec',
    'Echo',
    'STRONGEST',
    'LAST',
    'trace_beam',
    'cast_beam',
    'analytic_cluster_weights',
    'pixel_label',
    'pixel_surfaces',
    'neighborhood_labels',
    'simulate_sequence',
    'PRESETS',
    'preset',
    'wall_scene',
    'split_scene',
    'occluder_scene',
    'three_surface_scene',
    'window_scene',
    'foliage_scene',
    'corner_scene',
    'retroreflector_scene',
    'benchmark_spec',
    'benchmark_scenes',
]
