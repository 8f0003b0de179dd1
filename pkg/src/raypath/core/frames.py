"""Range-image data model and the RIF text format.

A spinning lidar reports one range per (elevation row, azimuth column) cell per
revolution. Every cell exists in every frame; a pulse without a detection holds
the ``NO_RETURN`` sentinel.
"""
import math
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..shared.errors import FormatError, InvalidArgumentError
from ..utils.files import atomic_write_text, read_text

logger = logging.getLogger(__name__)

NO_RETURN = -1.0
ABSENT = -1.0
MAGIC = "RIF1"
HEADER_KEYS = ("rows", "cols", "frames", "rate_hz", "elev_start", "elev_step", "az_start", "az_step")
AZIMUTH_SLACK_DEG = 1e-6


class Return(NamedTuple):
    """One cell of a range image."""

    range: float
    reflectance: Optional[float] = None

    @property
    def is_return(self) -> bool:
        return self.range != NO_RETURN


class RaypathId(NamedTuple):
    """Pixel index: elevation row i, azimuth column j."""

    i: int
    j: int

    @classmethod
    def parse(cls, text: str) -> "RaypathId":
        """Parse ``"i,j"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise InvalidArgumentError(f"ray must look like 'i,j', got {text!r}")
        try:
            return cls(int(parts[0]), int(parts[1]))
        except ValueError:
            raise InvalidArgumentError(f"ray must look like 'i,j', got {text!r}")


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Half-sizes of a (2*half_rows+1) x (2*half_cols+1) pixel block."""

    half_rows: int = 2
    half_cols: int = 2

    def __post_init__(self):
        if self.half_rows < 0 or self.half_cols < 0:
            raise InvalidArgumentError(f"neighborhood half sizes must be >= 0, got {self}")

    @property
    def rows(self) -> int:
        return 2 * self.half_rows + 1

    @property
    def cols(self) -> int:
        return 2 * self.half_cols + 1

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def offsets(self) -> Iterable[Tuple[int, int]]:
        """Yield (m, n) offsets in row-major order."""
        for m in range(-self.half_rows, self.half_rows + 1):
            for n in range(-self.half_cols, self.half_cols + 1):
                yield m, n

    @classmethod
    def from_patch(cls, text: str) -> "NeighborhoodSpec":
        """Parse a patch size such as ``"5x5"`` or ``"3x3"`` (rows x cols, both odd)."""
        try:
            rows, cols = (int(v) for v in text.lower().split("x"))
        except ValueError:
            raise InvalidArgumentError(f"patch must look like '5x5', got {text!r}")
        if rows < 1 or cols < 1 or rows % 2 == 0 or cols % 2 == 0:
            raise InvalidArgumentError(f"patch sides must be odd and positive, got {text!r}")
        return cls(rows // 2, cols // 2)

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True)
class Calibration:
    """Uniform angular grid, degrees: angle = start + index * step."""

    elev_start: float
    elev_step: float
    az_start: float
    az_step: float

    def elevation(self, i) -> np.ndarray:
        return self.elev_start + np.asarray(i, dtype=np.float64) * self.elev_step

    def azimuth(self, j) -> np.ndarray:
        return self.az_start + np.asarray(j, dtype=np.float64) * self.az_step

    def direction(self, i: int, j: int) -> np.ndarray:
        """Unit pointing vector of raypath (i, j)."""
        el = math.radians(float(self.elevation(i)))
        az = math.radians(float(self.azimuth(j)))
        return np.array([math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el)])


def _frozen_array(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2:
        raise InvalidArgumentError(f"{name} must be a 2D grid, got shape {array.shape}")
    array.setflags(write=False)
    return array


def _check_sentinel_grid(array: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    bad = (array < 0) & (array != NO_RETURN)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise InvalidArgumentError(f"{name} has negative value {array[i, j]} at ({i},{j})")


@dataclass(frozen=True, eq=False)
class RangeImage:
    """One revolution: an R x C grid of ranges (meters) with optional reflectance."""

    ranges: np.ndarray
    calibration: Calibration
    reflectance: Optional[np.ndarray] = None

    def __post_init__(self):
        ranges = _frozen_array(self.ranges, "ranges")
        rows, cols = ranges.shape
        if rows < 1 or cols < 1:
            raise InvalidArgumentError(f"range image must be at least 1x1, got {ranges.shape}")
        _check_sentinel_grid(ranges, "ranges")
        if abs(self.calibration.az_step) * cols > 360.0 + AZIMUTH_SLACK_DEG:
            raise InvalidArgumentError(f"{cols} columns of {self.calibration.az_step} deg exceed one revolution")
        object.__setattr__(self, "ranges", ranges)
        if self.reflectance is not None:
            reflectance = _frozen_array(self.reflectance, "reflectance")
            if reflectance.shape != ranges.shape:
                raise InvalidArgumentError(f"reflectance shape {reflectance.shape} != ranges shape {ranges.shape}")
            _check_sentinel_grid(reflectance, "reflectance")
            object.__setattr__(self, "reflectance", reflectance)

    @property
    def rows(self) -> int:
        return self.ranges.shape[0]

    @property
    def cols(self) -> int:
        return self.ranges.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.ranges.shape

    @property
    def returned(self) -> np.ndarray:
        """Boolean mask of cells holding a detection."""
        return self.ranges != NO_RETURN

    def contains(self, ray: RaypathId) -> bool:
        return 0 <= ray.i < self.rows and 0 <= ray.j < self.cols

    def check_ray(self, ray: RaypathId) -> None:
        if not self.contains(ray):
            raise InvalidArgumentError(f"ray ({ray.i},{ray.j}) outside {self.rows}x{self.cols} image")

    def cell(self, i: int, j: int) -> Return:
        reflectance = None
        if self.reflectance is not None and self.reflectance[i, j] != ABSENT:
            reflectance = float(self.reflectance[i, j])
        return Return(float(self.ranges[i, j]), reflectance)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RangeImage):
            return NotImplemented
        if self.calibration != other.calibration or not np.array_equal(self.ranges, other.ranges):
            return False
        if (self.reflectance is None) != (other.reflectance is None):
            return False
        return self.reflectance is None or np.array_equal(self.reflectance, other.reflectance)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """K time-ordered range images sharing shape and calibration."""

    frames: Tuple[RangeImage, ...]
    rate_hz: float = 10.0

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise InvalidArgumentError("a frame sequence needs at least one frame")
        first = frames[0]
        for k, frame in enumerate(frames[1:], start=1):
            if frame.shape != first.shape or frame.calibration != first.calibration:
                raise InvalidArgumentError(f"frame {k} differs in shape or calibration from frame 0")
        if not (self.rate_hz > 0 and math.isfinite(self.rate_hz)):
            raise InvalidArgumentError(f"rate_hz must be positive, got {self.rate_hz}")
        object.__setattr__(self, "frames", frames)

    @property
    def count(self) -> int:
        return len(self.frames)

    @property
    def rows(self) -> int:
        return self.frames[0].rows

    @property
    def cols(self) -> int:
        return self.frames[0].cols

    @property
    def calibration(self) -> Calibration:
        return self.frames[0].calibration

    @property
    def has_reflectance(self) -> bool:
        return any(f.reflectance is not None for f in self.frames)

    @cached_property
    def stack(self) -> np.ndarray:
        """All ranges as a read-only (K, R, C) array."""
        stacked = np.stack([f.ranges for f in self.frames])
        stacked.setflags(write=False)
        return stacked

    def check_ray(self, ray: RaypathId) -> None:
        self.frames[0].check_ray(ray)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, k: int) -> RangeImage:
        return self.frames[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSequence):
            return NotImplemented
        return self.rate_hz == other.rate_hz and self.frames == other.frames

    __hash__ = None


def sequence_from_arrays(
    ranges: np.ndarray,
    calibration: Calibration,
    rate_hz: float = 10.0,
    reflectance: Optional[np.ndarray] = None,
) -> FrameSequence:
    """Build a sequence from a (K, R, C) range array (and matching reflectance)."""
    ranges = np.asarray(ranges, dtype=np.float64)
    if ranges.ndim != 3:
        raise InvalidArgumentError(f"expected a (K, R, C) array, got shape {ranges.shape}")
    frames = []
    for k in range(ranges.shape[0]):
        refl = None if reflectance is None else reflectance[k]
        frames.append(RangeImage(ranges[k], calibration, refl))
    return FrameSequence(tuple(frames), rate_hz)


def sequence_slice(seq: FrameSequence, start: int = 0, stop: Optional[int] = None) -> FrameSequence:
    """Select frames [start, stop), e.g. the stationary opening of a recording."""
    frames = seq.frames[start:stop]
    if not frames:
        raise InvalidArgumentError(f"slice [{start}:{stop}] of {seq.count} frames is empty")
    return FrameSequence(frames, seq.rate_hz)


# --- RIF codec -------------------------------------------------------------------------------


def _format_value(value: float) -> str:
    if value == NO_RETURN:
        return "-1"
    return repr(float(value))


def _header_line(seq: FrameSequence) -> str:
    cal = seq.calibration
    fields = {
        "rows": seq.rows,
        "cols": seq.cols,
        "frames": seq.count,
        "rate_hz": repr(float(seq.rate_hz)),
        "elev_start": repr(float(cal.elev_start)),
        "elev_step": repr(float(cal.elev_step)),
        "az_start": repr(float(cal.az_start)),
        "az_step": repr(float(cal.az_step)),
    }
    return " ".join([MAGIC] + [f"{key}={fields[key]}" for key in HEADER_KEYS])


def _write_grids(seq: FrameSequence, grids: Sequence[np.ndarray]) -> str:
    lines = [_header_line(seq)]
    for k, grid in enumerate(grids):
        if k:
            lines.append("")
        for row in grid:
            lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_frames(seq: FrameSequence) -> str:
    """Serialize ranges to a canonical RIF document (blank line between frames)."""
    return _write_grids(seq, [f.ranges for f in seq.frames])


def write_reflectance(seq: FrameSequence) -> Optional[str]:
    """Serialize the reflectance sidecar, or None when no frame carries reflectance."""
    if not seq.has_reflectance:
        return None
    grids = [f.reflectance if f.reflectance is not None else np.full(f.shape, ABSENT) for f in seq.frames]
    return _write_grids(seq, grids)


class _Header(NamedTuple):
    rows: int
    cols: int
    frames: int
    rate_hz: float
    calibration: Calibration


def _parse_header(line: str) -> _Header:
    tokens = line.split()
    if not tokens or tokens[0] != MAGIC:
        raise FormatError(f"document must start with '{MAGIC}'", line=1)
    values = {}
    for token in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise FormatError(f"malformed header field {token!r}", line=1)
        values[key] = value
    missing = [key for key in HEADER_KEYS if key not in values]
    if missing:
        raise FormatError(f"header is missing {', '.join(missing)}", line=1)
    try:
        rows, cols, frames = int(values["rows"]), int(values["cols"]), int(values["frames"])
        floats = {key: float(values[key]) for key in HEADER_KEYS[3:]}
    except ValueError as e:
        raise FormatError(f"bad header value: {e}", line=1)
    if rows < 1 or cols < 1 or frames < 1:
        raise FormatError(f"rows, cols and frames must be >= 1, got {rows}, {cols}, {frames}", line=1)
    if not all(math.isfinite(v) for v in floats.values()):
        raise FormatError("header values must be finite", line=1)
    calibration = Calibration(floats["elev_start"], floats["elev_step"], floats["az_start"], floats["az_step"])
    return _Header(rows, cols, frames, floats["rate_hz"], calibration)


def _parse_grids(text: str, label: str) -> Tuple[_Header, np.ndarray]:
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"empty {label} document", line=1)
    header = _parse_header(lines[0])
    expected = header.frames * header.rows
    data = np.empty((expected, header.cols), dtype=np.float64)
    filled = 0
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            if filled % header.rows:
                raise FormatError(f"blank line inside frame {filled // header.rows}", line=number)
            continue
        if filled == expected:
            raise FormatError(f"more than {header.frames} frames of {header.rows} rows", line=number)
        parts = line.split(",")
        if len(parts) != header.cols:
            raise FormatError(f"expected {header.cols} values, found {len(parts)}", line=number)
        try:
            row = np.array([float(p) for p in parts], dtype=np.float64)
        except ValueError as e:
            raise FormatError(f"bad value: {e}", line=number)
        if not np.all(np.isfinite(row)):
            raise FormatError("values must be finite", line=number)
        if np.any((row < 0) & (row != NO_RETURN)):
            raise FormatError("negative value other than the -1 sentinel", line=number)
        data[filled] = row
        filled += 1
    if filled != expected:
        raise FormatError(
            f"expected {header.frames} frames of {header.rows} rows, found {filled} rows", line=len(lines) + 1
        )
    return header, data.reshape(header.frames, header.rows, header.cols)


def parse_frames(text: str, reflectance_text: Optional[str] = None) -> FrameSequence:
    """Parse a RIF document, optionally with its reflectance sidecar.

    Raises:
        FormatError: On header problems, shape mismatches or invalid values, naming the line
    """
    header, ranges = _parse_grids(text, "range")
    reflectance = None
    if reflectance_text is not None:
        side_header, reflectance = _parse_grids(reflectance_text, "reflectance")
        if side_header[:3] != header[:3] or side_header.calibration != header.calibration:
            raise FormatError("reflectance sidecar shape or calibration differs from the range document", line=1)
    logger.debug("parsed RIF: %d frames of %dx%d", header.frames, header.rows, header.cols)
    try:
        return sequence_from_arrays(ranges, header.calibration, header.rate_hz, reflectance)
    except InvalidArgumentError as e:
        raise FormatError(str(e), line=1)


def read_frames(path: Union[str, Path], reflectance_path: Optional[Union[str, Path]] = None) -> FrameSequence:
    """Load a RIF file and its optional reflectance sidecar."""
    reflectance_text = read_text(reflectance_path) if reflectance_path else None
    return parse_frames(read_text(path), reflectance_text)


def save_frames(
    seq: FrameSequence, path: Union[str, Path], reflectance_path: Optional[Union[str, Path]] = None
) -> List[Path]:
    """Atomically write a sequence (and its sidecar when requested and available)."""
    written = [atomic_write_text(path, write_frames(seq))]
    sidecar = write_reflectance(seq)
    if reflectance_path and sidecar is not None:
        written.append(atomic_write_text(reflectance_path, sidecar))
    return written


# --- geometry and neighborhoods --------------------------------------------------------------


def to_point_cloud(img: RangeImage) -> np.ndarray:
    """Convert returned cells to an (n, 4) array of x, y, z (meters) and reflectance.

    Cells are visited row-major; reflectance is ``-1`` where absent.
    """
    rows, cols = np.nonzero(img.returned)
    r = img.ranges[rows, cols]
    el = np.radians(img.calibration.elevation(rows))
    az = np.radians(img.calibration.azimuth(cols))
    cloud = np.empty((r.size, 4), dtype=np.float64)
    cloud[:, 0] = r * np.cos(el) * np.cos(az)
    cloud[:, 1] = r * np.cos(el) * np.sin(az)
    cloud[:, 2] = r * np.sin(el)
    cloud[:, 3] = ABSENT if img.reflectance is None else img.reflectance[rows, cols]
    return cloud


def export_xyz(img: RangeImage) -> str:
    """Point-cloud export shim: CSV ``x,y,z,reflectance`` with one line per return."""
    lines = ["x,y,z,reflectance"]
    for x, y, z, refl in to_point_cloud(img):
        lines.append(f"{float(x)!r},{float(y)!r},{float(z)!r},{_format_value(refl)}")
    return "\n".join(lines) + "\n"


def check_spec(shape: Tuple[int, int], spec: NeighborhoodSpec) -> None:
    """Rows are the only limit; columns wrap, so a block wider than the image revisits columns."""
    rows = shape[0]
    if spec.rows > rows:
        raise InvalidArgumentError(f"neighborhood {spec} taller than {rows} rows")


def neighborhood_ranges(ranges: np.ndarray, center: RaypathId, spec: NeighborhoodSpec) -> Tuple[np.ndarray, int]:
    """Ranges of the block around ``center`` (row-major) and the count of cells cut off at the top/bottom edge."""
    rows, cols = ranges.shape
    check_spec(ranges.shape, spec)
    i_lo, i_hi = center.i - spec.half_rows, center.i + spec.half_rows + 1
    kept = np.arange(max(i_lo, 0), min(i_hi, rows))
    col_idx = np.arange(center.j - spec.half_cols, center.j + spec.half_cols + 1) % cols
    block = ranges[np.ix_(kept, col_idx)].ravel()
    omitted = (spec.rows - kept.size) * spec.cols
    return block, omitted


def neighborhood(img: RangeImage, center: RaypathId, spec: NeighborhoodSpec) -> Tuple[List[Return], int]:
    """Cells of the (2h_r+1) x (2h_c+1) block around ``center``.

    Columns wrap around the revolution; rows outside the image are omitted and
    counted. Non-returns are included as values.

    Returns:
        Tuple of (cells in row-major order, number of omitted cells)
    """
    img.check_ray(center)
    check_spec(img.shape, spec)
    i_lo, i_hi = max(center.i - spec.half_rows, 0), min(center.i + spec.half_rows + 1, img.rows)
    cells = []
    for i in range(i_lo, i_hi):
        for n in range(-spec.half_cols, spec.half_cols + 1):
            cells.append(img.cell(i, (center.j + n) % img.cols))
    return cells, spec.size - len(cells)
