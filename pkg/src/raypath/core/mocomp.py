"""Patch-based motion compensation for a jittering handheld sensor.

Each frame k is searched, within a square window around the anchor raypath,
for the patch that best matches the anchor's patch in frame 0. The range at
the matched patch center stands in for the anchor's range in frame k.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .ecdf import CdfSource, EmpiricalCdf
from .frames import NO_RETURN, FrameSequence, NeighborhoodSpec, RaypathId, check_spec
from ..shared.errors import IncomparablePatchError, InvalidArgumentError, NoMatchError

logger = logging.getLogger(__name__)

DEFAULT_MIN_PAIRS = 6
TRACE_HEADER = "k,dp,dq,J,valid_pairs"


@dataclass(frozen=True)
class PatchMatch:
    """Optimal offset of frame k relative to the anchor patch in frame 0."""

    k: int
    dp: int
    dq: int
    cost: float
    valid_pairs: int

    @property
    def chebyshev(self) -> int:
        return max(abs(self.dp), abs(self.dq))


def _patch(ranges: np.ndarray, center: RaypathId, spec: NeighborhoodSpec) -> np.ndarray:
    """Block of ``ranges`` around ``center`` with out-of-image rows as NaN; columns wrap."""
    rows, cols = ranges.shape
    row_idx = np.arange(center.i - spec.half_rows, center.i + spec.half_rows + 1)
    col_idx = np.arange(center.j - spec.half_cols, center.j + spec.half_cols + 1) % cols
    inside = (row_idx >= 0) & (row_idx < rows)
    block = np.full((spec.rows, spec.cols), np.nan)
    block[inside] = ranges[np.ix_(row_idx[inside], col_idx)]
    block[block == NO_RETURN] = np.nan
    return block


def _cost(candidate: np.ndarray, anchor: np.ndarray, min_pairs: int) -> Tuple[float, int]:
    valid = np.isfinite(candidate) & np.isfinite(anchor)
    pairs = int(valid.sum())
    if pairs == 0 or pairs < min_pairs:
        raise IncomparablePatchError(f"only {pairs} comparable cell pairs (need {max(min_pairs, 1)})")
    diff = candidate[valid] - anchor[valid]
    return float(np.mean(diff * diff)), pairs


def patch_cost(
    seq: FrameSequence,
    candidate: RaypathId,
    anchor: RaypathId,
    k: int,
    spec: NeighborhoodSpec,
    min_pairs: int = DEFAULT_MIN_PAIRS,
) -> Tuple[float, int]:
    """Mean squared range difference between the candidate patch in frame k and the anchor patch in frame 0.

    Only pairs where both cells hold a finite return inside the image count.

    Args:
        seq: Frame sequence
        candidate: Center of the patch in frame k
        anchor: Center of the patch in frame 0
        k: Frame index
        spec: Patch size
        min_pairs: Fewest comparable pairs accepted

    Returns:
        Tuple of (J in square meters, number of pairs compared)

    Raises:
        IncomparablePatchError: If fewer than ``min_pairs`` pairs (or none) are comparable
    """
    if not 0 <= k < seq.count:
        raise InvalidArgumentError(f"frame {k} outside 0..{seq.count - 1}")
    seq.check_ray(anchor)
    seq.check_ray(candidate)
    check_spec((seq.rows, seq.cols), spec)
    return _cost(_patch(seq[k].ranges, candidate, spec), _patch(seq[0].ranges, anchor, spec), min_pairs)


def _search_offsets(radius: int) -> List[Tuple[int, int]]:
    """Window offsets ordered by the tie-break: Chebyshev distance, then row-major."""
    offsets = [(dp, dq) for dp in range(-radius, radius + 1) for dq in range(-radius, radius + 1)]
    return sorted(offsets, key=lambda o: (max(abs(o[0]), abs(o[1])), o[0], o[1]))


def best_match(
    seq: FrameSequence,
    anchor: RaypathId,
    k: int,
    radius: int,
    spec: NeighborhoodSpec,
    min_pairs: int = DEFAULT_MIN_PAIRS,
) -> PatchMatch:
    """Lowest-cost candidate in the (2*radius+1)^2 window around ``anchor``.

    Ties go to the smaller Chebyshev offset, then to the smaller (dp, dq) in
    row-major order. Candidate centers must lie on an image row; columns wrap.
    Frame 0 is its own anchor and always yields offset (0, 0) with J = 0.

    Raises:
        NoMatchError: If no candidate in the window is comparable
    """
    if radius < 0:
        raise InvalidArgumentError(f"search radius must be >= 0, got {radius}")
    if not 0 <= k < seq.count:
        raise InvalidArgumentError(f"frame {k} outside 0..{seq.count - 1}")
    seq.check_ray(anchor)
    check_spec((seq.rows, seq.cols), spec)
    if k == 0:
        pairs = int(np.isfinite(_patch(seq[0].ranges, anchor, spec)).sum())
        return PatchMatch(0, 0, 0, 0.0, pairs)

    anchor_patch = _patch(seq[0].ranges, anchor, spec)
    frame = seq[k].ranges
    best = None
    for dp, dq in _search_offsets(radius):
        p = anchor.i + dp
        if not 0 <= p < seq.rows:
            continue
        candidate = RaypathId(p, (anchor.j + dq) % seq.cols)
        try:
            cost, pairs = _cost(_patch(frame, candidate, spec), anchor_patch, min_pairs)
        except IncomparablePatchError as e:
            logger.debug("frame %d offset (%d,%d) skipped: %s", k, dp, dq, e)
            continue
        if best is None or cost < best.cost:
            best = PatchMatch(k, dp, dq, cost, pairs)
    if best is None:
        raise NoMatchError(f"no comparable patch within radius {radius} of ({anchor.i},{anchor.j}) in frame {k}")
    logger.debug("frame %d matched at (%d,%d), J=%g", k, best.dp, best.dq, best.cost)
    return best


def match_trace(
    seq: FrameSequence,
    anchor: RaypathId,
    radius: int,
    spec: NeighborhoodSpec,
    min_pairs: int = DEFAULT_MIN_PAIRS,
) -> List[PatchMatch]:
    """Best match of every frame; frames without a match are left out."""
    trace = []
    for k in range(seq.count):
        try:
            trace.append(best_match(seq, anchor, k, radius, spec, min_pairs))
        except NoMatchError as e:
            logger.warning("%s", e)
    return trace


def compensated_temporal_cdf(
    seq: FrameSequence,
    anchor: RaypathId,
    radius: int,
    spec: NeighborhoodSpec,
    min_pairs: int = DEFAULT_MIN_PAIRS,
) -> EmpiricalCdf:
    """Temporal CDF sampled at each frame's matched patch center.

    Frames whose match fails count as non-returns, so N stays K.
    """
    return trace_cdf(seq, anchor, match_trace(seq, anchor, radius, spec, min_pairs))


def trace_cdf(seq: FrameSequence, anchor: RaypathId, trace: List[PatchMatch]) -> EmpiricalCdf:
    """CDF of the ranges at the traced match centers; frames missing from the trace are non-returns."""
    observations = np.full(seq.count, NO_RETURN)
    for match in trace:
        observations[match.k] = seq[match.k].ranges[anchor.i + match.dp, (anchor.j + match.dq) % seq.cols]
    return EmpiricalCdf.from_observations(observations, CdfSource("compensated", anchor))


def trace_to_csv(trace: List[PatchMatch]) -> str:
    """Match trace as CSV ``k,dp,dq,J,valid_pairs``."""
    lines = [TRACE_HEADER]
    for m in trace:
        lines.append(f"{m.k},{m.dp},{m.dq},{m.cost!r},{m.valid_pairs}")
    return "\n".join(lines) + "\n"
