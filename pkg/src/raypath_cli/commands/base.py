"""
Base class and shared helpers for all CLI commands.
"""
import argparse
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from raypath.core.ecdf import EmpiricalCdf, cdf_stats, reflectance_stats, stats_to_dict
from raypath.core.frames import FrameSequence, NeighborhoodSpec, RaypathId, read_frames, sequence_slice
from raypath.shared.errors import InvalidArgumentError, NoDataError, UsageError
from raypath.utils.log_print import LogPrint

from ..table import dict_to_pt


@dataclass
class CommandResult:
    """Result of a command execution.

    ``outputs`` maps file names to document text in emission order; ``primary``
    names the document printed to stdout when no output directory is given.
    """
    success: bool
    message: str
    outputs: Dict[str, str] = field(default_factory=dict)
    primary: Optional[str] = None


class Command(ABC):
    """Abstract base class for all subcommands."""

    name: str
    help: str

    def __init__(self, log_print: Optional[LogPrint] = None):
        self.log_print = log_print or LogPrint()

    @staticmethod
    @abstractmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        """Register the subcommand's flags; defaults may be replaced by config values."""

    def _validate_params(self, args: argparse.Namespace) -> None:
        """Reject malformed invocations before any data is read.

        Raises:
            UsageError: If a required flag is missing or a value is malformed
        """

    @abstractmethod
    def execute(self, args: argparse.Namespace) -> CommandResult:
        """Run the analysis and return its documents."""

    def run(self, args: argparse.Namespace) -> CommandResult:
        self._validate_params(args)
        return self.execute(args)

    def show(self, record: dict) -> None:
        self.log_print.info("\n" + dict_to_pt(record).get_string(), with_time=False)


def add_input_arguments(parser: argparse.ArgumentParser, slicing: bool = True) -> None:
    parser.add_argument("--input", help="RIF range document")
    parser.add_argument("--reflectance", help="Optional RIF reflectance sidecar")
    if slicing:
        parser.add_argument("--start", type=int, default=0, help="First frame to use (default 0)")
        parser.add_argument("--stop", type=int, default=None, help="Frame index to stop before (default: all)")


def require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"missing required flag --{name.replace('_', '-')}")


def parse_ray(text) -> RaypathId:
    try:
        return RaypathId.parse(str(text))
    except InvalidArgumentError as e:
        raise UsageError(str(e))


def parse_patch(text) -> NeighborhoodSpec:
    try:
        return NeighborhoodSpec.from_patch(str(text))
    except InvalidArgumentError as e:
        raise UsageError(str(e))


def parse_floats(value, flag: str) -> List[float]:
    """Comma separated numbers from the command line, or a list from the config file."""
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return [float(v) for v in items if str(v).strip()]
    except ValueError:
        raise UsageError(f"--{flag} expects comma separated numbers, got {value!r}")


def parse_names(value, flag: str, allowed) -> List[str]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    names = [str(v).strip() for v in items if str(v).strip()]
    bad = [n for n in names if n not in allowed]
    if bad or not names:
        raise UsageError(f"--{flag} takes a comma separated subset of {', '.join(allowed)}, got {value!r}")
    return names


def load_sequence(args: argparse.Namespace) -> FrameSequence:
    """Read --input (and --reflectance), then apply --start/--stop when the command offers them."""
    seq = read_frames(args.input, args.reflectance)
    start, stop = getattr(args, "start", 0), getattr(args, "stop", None)
    if start or stop is not None:
        seq = sequence_slice(seq, start, stop)
    return seq


def check_ray(seq: FrameSequence, ray: RaypathId) -> None:
    if not seq[0].contains(ray):
        raise UsageError(f"--ray {ray.i},{ray.j} outside the {seq.rows}x{seq.cols} image")


def check_frame(seq: FrameSequence, k: int) -> None:
    if not 0 <= k < seq.count:
        raise UsageError(f"--frame {k} outside 0..{seq.count - 1}")


def cdf_record(cdf: EmpiricalCdf, seq: Optional[FrameSequence] = None, ray: Optional[RaypathId] = None) -> dict:
    """Stats record of a CDF; an all-non-return CDF yields counts only."""
    try:
        record = stats_to_dict(cdf_stats(cdf), cdf.source)
    except NoDataError:
        record = {"count": 0, "return_fraction": 0.0, "source": str(cdf.source)}
    record["total_count"] = cdf.total_count
    if seq is not None and ray is not None and seq.has_reflectance:
        try:
            record["reflectance"] = reflectance_stats(seq, ray)
        except NoDataError:
            pass
    return record
