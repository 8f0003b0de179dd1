import numpy as np
import pytest

from raypath.core.frames import Calibration, sequence_from_arrays

GRID = Calibration(elev_start=-2.0, elev_step=0.5, az_start=0.0, az_step=1.0)


@pytest.fixture
def calibration():
    return GRID


@pytest.fixture
def make_sequence():
    """Build a FrameSequence from a (K, R, C) nested list or array."""

    def _make(ranges, reflectance=None, rate_hz=10.0, calibration=GRID):
        refl = None if reflectance is None else np.asarray(reflectance, dtype=np.float64)
        return sequence_from_arrays(np.asarray(ranges, dtype=np.float64), calibration, rate_hz, refl)

    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
