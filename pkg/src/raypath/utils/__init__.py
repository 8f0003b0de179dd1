"""Utility functions for raypath."""

from .files import ensure_dir_exists, atomic_write_text, dumps_json, read_text
from .rng import stream, pixel_rng, trial_rng
from .log_print import LogPrint


__all__ = [
    'ensure_dir_exists',
    'atomic_write_text',
    'dumps_json',
    'read_text',
    'stream',
    'pixel_rng',
    'trial_rng',
    'LogPrint',
]
