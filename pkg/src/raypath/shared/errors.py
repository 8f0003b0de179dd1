"""Exception hierarchy shared by the raypath library and CLI."""
from typing import Optional


class RaypathError(Exception):
    """Base class for data and domain errors raised by raypath."""


class InvalidArgumentError(RaypathError, ValueError):
    """A caller passed an argument outside the operation's domain."""


class FormatError(RaypathError, ValueError):
    """A document could not be parsed.

    Args:
        message: Human readable description of the problem
        line: 1-based line number of the offending line, when known
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoDataError(RaypathError, ValueError):
    """An operation needs at least one finite range sample."""


class IncomparablePatchError(RaypathError, ValueError):
    """Two patches share too few finite cell pairs to be compared."""


class NoMatchError(RaypathError, ValueError):
    """No candidate patch in the search window could be compared to the anchor."""


class InfeasibleThresholdError(RaypathError, ValueError):
    """A CDF threshold cannot split the returned samples."""


class FitError(RaypathError, ValueError):
    """A mixture could not be fitted to the given clusters."""


class AlignmentError(RaypathError, ValueError):
    """Two index-aligned sequences have different lengths."""


class UnsupportedSceneError(RaypathError, ValueError):
    """The scene contains a surface the requested computation cannot handle."""


class DegenerateRegistrationError(RaypathError, ValueError):
    """A registration step had nothing to align."""


class ConfigError(RaypathError, ValueError):
    """A configuration file is unreadable or inconsistent."""


class UsageError(Exception):
    """A command line invocation is malformed (mapped to exit code 2)."""
