from .dicts import DotDict
from .errors import (
    RaypathError,
    InvalidArgumentError,
    FormatError,
    NoDataError,
    IncomparablePatchError,
    NoMatchError,
    InfeasibleThresholdError,
    FitError,
    AlignmentError,
    UnsupportedSceneError,
    DegenerateRegistrationError,
    ConfigError,
    UsageError,
)
