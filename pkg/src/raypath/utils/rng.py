"""Seeded, splittable random streams.

Every random draw in raypath comes from a numpy Generator derived from a user
seed plus a spawn key, so results do not depend on evaluation order or on how
work is split across processes.
"""

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``(seed, *key)``.

    Args:
        seed: Non-negative user seed
        key: Integer path identifying the sub-stream (pixel, frame, trial, ...)

    Returns:
        np.random.Generator: Independent stream, identical on every call with the same arguments
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key)))


def pixel_rng(seed: int, i: int, j: int, k: int) -> np.random.Generator:
    """Stream for one pulse of raypath (i, j) in frame k."""
    return stream(seed, 0, i, j, k)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Stream for one Monte-Carlo trial."""
    return stream(seed, 1, trial)
