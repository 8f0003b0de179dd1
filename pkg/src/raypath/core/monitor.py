"""Single-frame multi-return monitor built on spatial CDFs.

A raypath is flagged when its neighborhood's ranges spread too far, split into
several clusters, or go missing too often. Verdicts depend on one frame only.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence

import numpy as np

from .ecdf import spatial_cdf
from .frames import NeighborhoodSpec, RangeImage, RaypathId, check_spec
from .mixture import DEFAULT_MIN_GAP, auto_segment
from ..shared.errors import AlignmentError, FormatError, InvalidArgumentError

logger = logging.getLogger(__name__)

VERDICT_HEADER = "i,j,flagged,reason,span,clusters,nonreturn_fraction"


class Reason(str, Enum):
    SPAN = "SPAN"
    CLUSTERS = "CLUSTERS"
    NONRETURN = "NONRETURN"
    CLEAR = "CLEAR"


@dataclass
class MonitorConfig:
    """Monitor thresholds; tune per sensor with evaluate_monitor."""
    spec: NeighborhoodSpec = field(default_factory=NeighborhoodSpec)
    span_threshold: float = 0.25
    min_gap: float = DEFAULT_MIN_GAP
    min_cluster_count: int = 2
    max_nonreturn_fraction: float = 0.3

    def __post_init__(self):
        if isinstance(self.spec, str):
            self.spec = NeighborhoodSpec.from_patch(self.spec)
        if not self.span_threshold > 0 or not self.min_gap > 0:
            raise InvalidArgumentError("span_threshold and min_gap must be positive")
        if self.min_cluster_count < 2:
            raise InvalidArgumentError(f"min_cluster_count must be >= 2, got {self.min_cluster_count}")
        if not 0.0 <= self.max_nonreturn_fraction <= 1.0:
            raise InvalidArgumentError(f"max_nonreturn_fraction must be in [0, 1], got {self.max_nonreturn_fraction}")

    @classmethod
    def from_dict(cls, data: dict) -> 'MonitorConfig':
        """Create a MonitorConfig from a dictionary; ``patch`` ("5x5") sets the neighborhood."""
        data = dict(data)
        if "patch" in data:
            data["spec"] = data.pop("patch")
        valid_keys = cls.__dataclass_fields__.keys()
        filtered_data = {k: v for k, v in data.items() if k in valid_keys}
        return cls(**filtered_data)


@dataclass(frozen=True)
class MonitorVerdict:
    ray: RaypathId
    flagged: bool
    span: float
    cluster_count: int
    nonreturn_fraction: float
    reason: Reason


def classify_raypath(img: RangeImage, ray: RaypathId, cfg: MonitorConfig) -> MonitorVerdict:
    """Verdict for one raypath from its spatial CDF.

    Criteria are checked in the order span, cluster count, non-return
    fraction; the first one triggered becomes the reason. A neighborhood with
    no returns at all is flagged NONRETURN.
    """
    cdf = spatial_cdf(img, ray, cfg.spec)
    nonreturn_fraction = 1.0 - cdf.return_fraction
    if cdf.count == 0:
        return MonitorVerdict(ray, True, 0.0, 0, nonreturn_fraction, Reason.NONRETURN)
    span = float(cdf.samples[-1] - cdf.samples[0])
    clusters = len(auto_segment(cdf, cfg.min_gap)) + 1
    if span > cfg.span_threshold:
        reason = Reason.SPAN
    elif clusters >= cfg.min_cluster_count:
        reason = Reason.CLUSTERS
    elif nonreturn_fraction > cfg.max_nonreturn_fraction:
        reason = Reason.NONRETURN
    else:
        reason = Reason.CLEAR
    return MonitorVerdict(ray, reason is not Reason.CLEAR, span, clusters, nonreturn_fraction, reason)


def scan_frame(img: RangeImage, cfg: MonitorConfig) -> List[MonitorVerdict]:
    """Verdicts for every pixel in row-major order."""
    check_spec(img.shape, cfg.spec)
    verdicts = [classify_raypath(img, RaypathId(i, j), cfg) for i in range(img.rows) for j in range(img.cols)]
    logger.debug("scanned %dx%d frame: %d flagged", img.rows, img.cols, sum(v.flagged for v in verdicts))
    return verdicts


def verdict_mask(verdicts: Sequence[MonitorVerdict], rows: int, cols: int) -> np.ndarray:
    """Boolean R x C grid of flagged pixels."""
    mask = np.zeros((rows, cols), dtype=bool)
    for v in verdicts:
        mask[v.ray.i, v.ray.j] = v.flagged
    return mask


def evaluate_monitor(verdicts: Sequence[MonitorVerdict], labels: Sequence[bool]) -> Dict[str, float]:
    """Confusion counts, precision and recall of flags against ground-truth multi-return labels.

    Precision without any flag and recall without any positive are 1.0.

    Raises:
        AlignmentError: If verdicts and labels differ in length
    """
    labels = np.asarray(labels, dtype=bool).ravel()
    if len(verdicts) != labels.size:
        raise AlignmentError(f"{len(verdicts)} verdicts vs {labels.size} labels")
    flagged = np.array([v.flagged for v in verdicts], dtype=bool)
    tp = int(np.sum(flagged & labels))
    fp = int(np.sum(flagged & ~labels))
    fn = int(np.sum(~flagged & labels))
    tn = int(np.sum(~flagged & ~labels))
    return {
        "precision": tp / (tp + fp) if tp + fp else 1.0,
        "recall": tp / (tp + fn) if tp + fn else 1.0,
        "tp": tp,
        "fp": fp,
        "fn": fn,
        "tn": tn,
    }


def mask_to_pgm(mask: np.ndarray) -> str:
    """Plain PGM grid: ``P2``, ``cols rows``, max value 1, then one row of 0/1 per line."""
    mask = np.asarray(mask, dtype=bool)
    rows, cols = mask.shape
    lines = ["P2", f"{cols} {rows}", "1"]
    lines.extend(" ".join("1" if v else "0" for v in row) for row in mask)
    return "\n".join(lines) + "\n"


def mask_from_pgm(text: str) -> np.ndarray:
    """Parse a 0/1 PGM grid written by mask_to_pgm.

    Raises:
        FormatError: On a bad header, wrong row length or a value other than 0/1
    """
    lines = [(n, line.strip()) for n, line in enumerate(text.splitlines(), start=1)]
    lines = [(n, line) for n, line in lines if line and not line.startswith("#")]
    if len(lines) < 3 or lines[0][1] != "P2":
        raise FormatError("expected a 'P2' mask header", line=1)
    try:
        cols, rows = (int(v) for v in lines[1][1].split())
        max_value = int(lines[2][1])
    except ValueError:
        raise FormatError("expected 'cols rows' and a max value", line=lines[1][0])
    if max_value != 1 or rows < 1 or cols < 1:
        raise FormatError("mask must be at least 1x1 with max value 1", line=lines[2][0])
    body = lines[3:]
    if len(body) != rows:
        raise FormatError(f"expected {rows} mask rows, found {len(body)}", line=body[-1][0] if body else lines[2][0])
    mask = np.zeros((rows, cols), dtype=bool)
    for r, (number, line) in enumerate(body):
        values = line.split()
        if len(values) != cols or any(v not in ("0", "1") for v in values):
            raise FormatError(f"expected {cols} values of 0 or 1", line=number)
        mask[r] = [v == "1" for v in values]
    return mask


def verdicts_to_csv(verdicts: Sequence[MonitorVerdict]) -> str:
    """Verdict table ``i,j,flagged,reason,span,clusters,nonreturn_fraction``."""
    lines = [VERDICT_HEADER]
    for v in verdicts:
        lines.append(
            f"{v.ray.i},{v.ray.j},{int(v.flagged)},{v.reason.value},"
            f"{v.span!r},{v.cluster_count},{v.nonreturn_fraction!r}"
        )
    return "\n".join(lines) + "\n"
