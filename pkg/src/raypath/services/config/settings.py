"""Default parameter bundles for the analysis commands."""
from dataclasses import dataclass

from ...core.mixture import DEFAULT_MIN_GAP, DEFAULT_SIGMA_FLOOR
from ...core.mocomp import DEFAULT_MIN_PAIRS


@dataclass(frozen=True)
class MatchSettings:
    """Settings for patch-based motion compensation."""
    radius: int = 2
    patch: str = "5x5"
    min_pairs: int = DEFAULT_MIN_PAIRS


@dataclass(frozen=True)
class FitSettings:
    """Settings for mixture fitting."""
    min_gap: float = DEFAULT_MIN_GAP
    sigma_floor: float = DEFAULT_SIGMA_FLOOR


DEFAULT_MATCH_SETTINGS = MatchSettings()
DEFAULT_FIT_SETTINGS = FitSettings()
