"""Empirical range CDFs: temporal (one raypath over frames) and spatial (one neighborhood in one frame).

Non-returns count toward the normalization but add no step, so a CDF saturates
at the fraction of pulses that returned.
"""
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .frames import ABSENT, NO_RETURN, FrameSequence, NeighborhoodSpec, RangeImage, RaypathId, neighborhood_ranges
from ..shared.errors import FormatError, InvalidArgumentError, NoDataError

logger = logging.getLogger(__name__)

CSV_HEADER = "x,F"
TOTAL_COUNT_PREFIX = "# total_count="


@dataclass(frozen=True)
class CdfSource:
    """Where a CDF came from: temporal(i,j), spatial(i,j,k) or compensated(i,j)."""

    kind: str
    ray: Optional[RaypathId] = None
    frame: Optional[int] = None

    def __str__(self) -> str:
        if self.ray is None:
            return self.kind
        if self.frame is None:
            return f"{self.kind}({self.ray.i},{self.ray.j})"
        return f"{self.kind}({self.ray.i},{self.ray.j},{self.frame})"


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Sorted finite range samples over ``total_count`` observations (non-returns included)."""

    samples: np.ndarray
    total_count: int
    source: CdfSource = CdfSource("samples")

    def __post_init__(self):
        samples = np.sort(np.asarray(self.samples, dtype=np.float64).ravel())
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("CDF samples must be finite")
        if self.total_count < 1 or samples.size > self.total_count:
            raise InvalidArgumentError(f"total_count {self.total_count} must be >= 1 and >= {samples.size} samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_observations(cls, values, source: CdfSource = CdfSource("samples")) -> "EmpiricalCdf":
        """Build from raw observations where ``NO_RETURN`` marks a pulse without detection."""
        values = np.asarray(values, dtype=np.float64).ravel()
        return cls(values[values != NO_RETURN], values.size, source)

    @property
    def count(self) -> int:
        return int(self.samples.size)

    @property
    def return_fraction(self) -> float:
        return self.count / self.total_count

    def __call__(self, x: float) -> float:
        return eval_cdf(self, x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalCdf):
            return NotImplemented
        return self.total_count == other.total_count and np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class CdfStats:
    count: int
    return_fraction: float
    mean: float
    std: float
    min: float
    max: float
    span: float


def step(y: float) -> int:
    """Unit step: 0 for y < 0, 1 for y >= 0."""
    if not math.isfinite(y):
        raise InvalidArgumentError(f"step argument must be finite, got {y}")
    return 1 if y >= 0 else 0


def eval_cdf(cdf: EmpiricalCdf, x: float) -> float:
    """Fraction of observations with a finite range <= x (right-continuous)."""
    if math.isnan(x):
        raise InvalidArgumentError("cannot evaluate a CDF at NaN")
    return int(np.searchsorted(cdf.samples, x, side="right")) / cdf.total_count


def eval_cdf_left(cdf: EmpiricalCdf, x: float) -> float:
    """Left limit of the CDF at x: fraction of observations with range < x."""
    return int(np.searchsorted(cdf.samples, x, side="left")) / cdf.total_count


def temporal_cdf(seq: FrameSequence, ray: RaypathId) -> EmpiricalCdf:
    """Distribution of one raypath's range over all K frames."""
    seq.check_ray(ray)
    return EmpiricalCdf.from_observations(seq.stack[:, ray.i, ray.j], CdfSource("temporal", ray))


def spatial_cdf(img: RangeImage, ray: RaypathId, spec: NeighborhoodSpec, frame: Optional[int] = None) -> EmpiricalCdf:
    """Distribution of ranges in the neighborhood of ``ray`` within one frame.

    The normalization is the effective neighborhood size after edge-row truncation.
    """
    img.check_ray(ray)
    block, _ = neighborhood_ranges(img.ranges, ray, spec)
    return EmpiricalCdf.from_observations(block, CdfSource("spatial", ray, frame))


def spatial_cdfs(seq: FrameSequence, ray: RaypathId, spec: NeighborhoodSpec) -> List[EmpiricalCdf]:
    """One spatial CDF per frame, in frame order."""
    return [spatial_cdf(frame, ray, spec, k) for k, frame in enumerate(seq.frames)]


def pooled_spatial_cdf(seq: FrameSequence, ray: RaypathId, spec: NeighborhoodSpec) -> EmpiricalCdf:
    """All frames' neighborhood observations pooled into one CDF."""
    seq.check_ray(ray)
    blocks = [neighborhood_ranges(frame.ranges, ray, spec)[0] for frame in seq.frames]
    return EmpiricalCdf.from_observations(np.concatenate(blocks), CdfSource("spatial-pooled", ray))


def jump_points(cdf: EmpiricalCdf) -> np.ndarray:
    """Distinct sample values, ascending."""
    return np.unique(cdf.samples)


def _fractions(cdf: EmpiricalCdf, points: np.ndarray, side: str) -> np.ndarray:
    return np.searchsorted(cdf.samples, points, side) / cdf.total_count


def ks_statistic(a: EmpiricalCdf, b: EmpiricalCdf) -> Tuple[float, Optional[float]]:
    """Sup-norm distance between two CDFs and the x where it is attained.

    Both CDFs are step functions, so the supremum is reached either at a jump
    (right value) or just below one (left limit), or in the saturated tail,
    which equals the value at the largest union point. The location is None
    when neither CDF has samples.
    """
    points = np.union1d(a.samples, b.samples)
    if points.size == 0:
        return 0.0, None
    right = np.abs(_fractions(a, points, "right") - _fractions(b, points, "right"))
    left = np.abs(_fractions(a, points, "left") - _fractions(b, points, "left"))
    i_right, i_left = int(np.argmax(right)), int(np.argmax(left))
    if left[i_left] > right[i_right]:
        return float(left[i_left]), float(points[i_left])
    return float(right[i_right]), float(points[i_right])


def ks_distance(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """Kolmogorov-Smirnov distance sup_x |A(x) - B(x)|."""
    return ks_statistic(a, b)[0]


def cdf_stats(cdf: EmpiricalCdf) -> CdfStats:
    """Population mean/std and extent of the finite samples.

    Raises:
        NoDataError: If the CDF has no finite samples
    """
    if cdf.count == 0:
        raise NoDataError(f"{cdf.source} has no returns ({cdf.total_count} non-returns)")
    samples = cdf.samples
    lo, hi = float(samples[0]), float(samples[-1])
    return CdfStats(
        count=cdf.count,
        return_fraction=cdf.return_fraction,
        mean=float(np.mean(samples)),
        std=float(np.std(samples)),
        min=lo,
        max=hi,
        span=hi - lo,
    )


def stats_to_dict(stats: CdfStats, source: Optional[CdfSource] = None) -> Dict:
    record = dict(stats.__dict__)
    if source is not None:
        record["source"] = str(source)
    return record


def reflectance_samples(seq: FrameSequence, ray: RaypathId) -> List[Tuple[float, float]]:
    """(range, reflectance) pairs of the raypath's returns that carry reflectance, in frame order."""
    seq.check_ray(ray)
    pairs = []
    for frame in seq.frames:
        r = frame.ranges[ray.i, ray.j]
        if r == NO_RETURN or frame.reflectance is None:
            continue
        refl = frame.reflectance[ray.i, ray.j]
        if refl != ABSENT:
            pairs.append((float(r), float(refl)))
    return pairs


def reflectance_stats(seq: FrameSequence, ray: RaypathId) -> Dict[str, float]:
    """Count, min, max and mean reflectance over the raypath's returns."""
    pairs = reflectance_samples(seq, ray)
    if not pairs:
        raise NoDataError(f"ray ({ray.i},{ray.j}) has no returns with reflectance")
    values = np.array([p[1] for p in pairs])
    return {"count": len(pairs), "min": float(values.min()), "max": float(values.max()), "mean": float(values.mean())}


# --- CSV codec -------------------------------------------------------------------------------


def cdf_to_csv(cdf: EmpiricalCdf) -> str:
    """Jump-point CSV: for each distinct sample, the value just before and at the jump.

    A leading ``# total_count=N`` comment keeps the observation count, which the
    F values alone only determine up to a common factor.
    """
    lines = [f"{TOTAL_COUNT_PREFIX}{cdf.total_count}", CSV_HEADER]
    for x in jump_points(cdf):
        x = float(x)
        lines.append(f"{x!r},{eval_cdf_left(cdf, x)!r}")
        lines.append(f"{x!r},{eval_cdf(cdf, x)!r}")
    return "\n".join(lines) + "\n"


def _total_count_comment(line: str, number: int) -> Optional[int]:
    if not line.replace(" ", "").startswith(TOTAL_COUNT_PREFIX.replace(" ", "")):
        return None
    try:
        total = int(line.split("=", 1)[1])
    except ValueError:
        raise FormatError("total_count must be an integer", line=number)
    if total < 1:
        raise FormatError(f"total_count must be >= 1, got {total}", line=number)
    return total


def cdf_from_csv(text: str, source: CdfSource = CdfSource("csv")) -> EmpiricalCdf:
    """Rebuild a CDF from jump-point CSV.

    The total count comes from the ``# total_count=N`` comment when present.
    Without it, the least common denominator of the F values is used, which
    reproduces the step function exactly but not the original count. A CSV
    without rows yields an empty CDF.

    Raises:
        FormatError: If the header, the pairing of rows, the values or the total count are invalid
    """
    rows = []
    header_seen = False
    declared = None
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            total = _total_count_comment(line, number)
            declared = total if total is not None else declared
            continue
        if not header_seen:
            if line.replace(" ", "") != CSV_HEADER:
                raise FormatError(f"expected header '{CSV_HEADER}'", line=number)
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError("expected two columns", line=number)
        try:
            x, f = float(parts[0]), float(parts[1])
        except ValueError as e:
            raise FormatError(f"bad value: {e}", line=number)
        if not (math.isfinite(x) and 0.0 <= f <= 1.0):
            raise FormatError("x must be finite and F within [0, 1]", line=number)
        rows.append((number, x, f))
    if not header_seen:
        raise FormatError(f"missing header '{CSV_HEADER}'", line=1)
    if len(rows) % 2:
        raise FormatError("jump rows must come in before/after pairs", line=rows[-1][0])
    if not rows:
        return EmpiricalCdf(np.empty(0), declared or 1, source)
    if declared is None:
        fractions = [Fraction(f).limit_denominator(10**7) for _, _, f in rows]
        total = 1
        for f in fractions:
            total = total * f.denominator // math.gcd(total, f.denominator)
        counts = [int(f * total) for f in fractions]
    else:
        total = declared
        counts = [int(round(f * total)) for _, _, f in rows]
        for (number, _, f), count in zip(rows, counts):
            if abs(f * total - count) > 1e-6:
                raise FormatError(f"F={f!r} is not a multiple of 1/{total}", line=number)
    samples = []
    previous_x, previous_count = -math.inf, 0
    for (number, x_before, _), (_, x_after, _), before, after in zip(rows[::2], rows[1::2], counts[::2], counts[1::2]):
        if x_before != x_after or x_before <= previous_x or before != previous_count or after <= before:
            raise FormatError("rows do not describe an increasing step function", line=number)
        samples.extend([x_after] * (after - before))
        previous_x, previous_count = x_after, after
    return EmpiricalCdf(np.array(samples), total, source)
