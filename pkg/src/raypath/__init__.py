"""
raypath package initialization.
"""
__version__ = "0.1.0"

from .core import (
    NO_RETURN,
    RaypathId,
    NeighborhoodSpec,
    RangeImage,
    FrameSequence,
    EmpiricalCdf,
    GaussianMixture,
    MonitorConfig,
    parse_frames,
    write_frames,
    temporal_cdf,
    spatial_cdf,
    compensated_temporal_cdf,
)
from .shared.errors import RaypathError

__all__ = [
    '__version__',
    'NO_RETURN',
    'RaypathId',
    'NeighborhoodSpec',
    'RangeImage',
    'FrameSequence',
    'EmpiricalCdf',
    'GaussianMixture',
    'MonitorConfig',
    'parse_frames',
    'write_frames',
    'temporal_cdf',
    'spatial_cdf',
    'compensated_temporal_cdf',
    'RaypathError',
]
