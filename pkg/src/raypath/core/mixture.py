"""Descriptive Gaussian mixtures of multi-return range distributions.

Returned samples are split into clusters at CDF-value thresholds and each
cluster contributes one weighted normal component. Non-returns stay outside
the mixture; comparisons against an empirical CDF rescale by its return
fraction.
"""
import json
import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .ecdf import EmpiricalCdf, eval_cdf, jump_points
from ..shared.errors import FitError, FormatError, InfeasibleThresholdError, InvalidArgumentError, NoDataError

logger = logging.getLogger(__name__)

DEFAULT_SIGMA_FLOOR = 0.005
DEFAULT_MIN_GAP = 0.3
WEIGHT_TOLERANCE = 1e-12
REPORT_HEADER = "cluster,alpha,mu,sigma,count"


@dataclass(frozen=True)
class GaussianComponent:
    alpha: float
    mu: float
    sigma: float


@dataclass(frozen=True)
class GaussianMixture:
    """Ordered components with weights summing to one and strictly increasing means."""

    clusters: Tuple[GaussianComponent, ...]

    def __post_init__(self):
        clusters = tuple(self.clusters)
        if not clusters:
            raise InvalidArgumentError("a mixture needs at least one component")
        if any(not c.alpha > 0 or not c.sigma > 0 for c in clusters):
            raise InvalidArgumentError("component weights and standard deviations must be positive")
        if abs(math.fsum(c.alpha for c in clusters) - 1.0) > WEIGHT_TOLERANCE:
            raise InvalidArgumentError("component weights must sum to 1")
        if any(b.mu <= a.mu for a, b in zip(clusters, clusters[1:])):
            raise InvalidArgumentError("component means must be strictly increasing")
        object.__setattr__(self, "clusters", clusters)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.alpha for c in self.clusters])

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mu for c in self.clusters])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.sigma for c in self.clusters])

    def __len__(self) -> int:
        return len(self.clusters)


def _check_thresholds(cdf: EmpiricalCdf, thresholds: Sequence[float]) -> List[float]:
    thresholds = [float(t) for t in thresholds]
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise InfeasibleThresholdError(f"thresholds must be strictly ascending, got {thresholds}")
    for t in thresholds:
        if not 0.0 < t < cdf.return_fraction:
            raise InfeasibleThresholdError(
                f"threshold {t} outside (0, {cdf.return_fraction}) for {cdf.count} returns of {cdf.total_count}"
            )
    return thresholds


def segment_by_thresholds(cdf: EmpiricalCdf, thresholds: Sequence[float]) -> List[np.ndarray]:
    """Split the sorted returned samples where the cumulative fraction first exceeds each threshold.

    Args:
        cdf: Empirical CDF with at least one return
        thresholds: Strictly ascending fractions, each inside (0, return_fraction)

    Returns:
        List of len(thresholds) + 1 sorted sample arrays that concatenate to ``cdf.samples``

    Raises:
        NoDataError: If the CDF has no returns
        InfeasibleThresholdError: If a threshold cannot split the samples
    """
    if cdf.count == 0:
        raise NoDataError(f"{cdf.source} has no returns to segment")
    thresholds = _check_thresholds(cdf, thresholds)
    cumulative = np.arange(1, cdf.count + 1) / cdf.total_count
    cuts = np.searchsorted(cumulative, thresholds, side="right")
    return [np.array(part) for part in np.split(cdf.samples, cuts)]


def auto_segment(cdf: EmpiricalCdf, min_gap: float = DEFAULT_MIN_GAP) -> List[float]:
    """Thresholds at every gap wider than ``min_gap`` between consecutive sorted samples.

    Each threshold is the cumulative fraction of the sample below the gap.
    """
    if not min_gap > 0:
        raise InvalidArgumentError(f"min_gap must be positive, got {min_gap}")
    gaps = np.flatnonzero(np.diff(cdf.samples) > min_gap)
    return [float((idx + 1) / cdf.total_count) for idx in gaps]


def fit_gmm(clusters: Sequence[Sequence[float]], sigma_floor: float = DEFAULT_SIGMA_FLOOR) -> GaussianMixture:
    """Weight, mean and population standard deviation of every cluster.

    Raises:
        FitError: On an empty cluster or when two clusters share a mean
    """
    if not sigma_floor > 0:
        raise InvalidArgumentError(f"sigma_floor must be positive, got {sigma_floor}")
    arrays = [np.sort(np.asarray(c, dtype=np.float64).ravel()) for c in clusters]
    if not arrays:
        raise FitError("no clusters to fit")
    for idx, arr in enumerate(arrays):
        if arr.size == 0:
            raise FitError(f"cluster {idx} is empty")
    total = sum(arr.size for arr in arrays)
    components = [
        GaussianComponent(arr.size / total, float(np.mean(arr)), max(float(np.std(arr)), sigma_floor))
        for arr in arrays
    ]
    components.sort(key=lambda c: c.mu)
    try:
        return GaussianMixture(tuple(components))
    except InvalidArgumentError as e:
        raise FitError(str(e))


def fit_cdf(
    cdf: EmpiricalCdf,
    thresholds: Optional[Sequence[float]] = None,
    min_gap: float = DEFAULT_MIN_GAP,
    sigma_floor: float = DEFAULT_SIGMA_FLOOR,
) -> Tuple[GaussianMixture, List[np.ndarray]]:
    """Segment and fit in one step; explicit thresholds take precedence over gap detection."""
    if thresholds is None:
        thresholds = auto_segment(cdf, min_gap)
        logger.info("gap scan (min_gap=%g) found %d thresholds", min_gap, len(thresholds))
    clusters = segment_by_thresholds(cdf, thresholds)
    return fit_gmm(clusters, sigma_floor), clusters


def gmm_pdf(g: GaussianMixture, x):
    """Mixture density at x (scalar or array), per meter."""
    x = np.asarray(x, dtype=np.float64)
    dens = norm.pdf(x[..., None], loc=g.means, scale=g.sigmas) @ g.weights
    return float(dens) if dens.ndim == 0 else dens


def gmm_cdf(g: GaussianMixture, x):
    """Mixture CDF at x (scalar or array): sum of weighted normal CDFs."""
    x = np.asarray(x, dtype=np.float64)
    cum = norm.cdf(x[..., None], loc=g.means, scale=g.sigmas) @ g.weights
    return float(cum) if cum.ndim == 0 else cum


def model_fit_error(g: GaussianMixture, cdf: EmpiricalCdf) -> float:
    """Largest gap between the scaled mixture CDF and the empirical CDF over its jump points."""
    if cdf.count == 0:
        raise NoDataError(f"{cdf.source} has no returns")
    points = jump_points(cdf)
    empirical = np.array([eval_cdf(cdf, x) for x in points])
    model = gmm_cdf(g, points) * cdf.return_fraction
    return float(np.max(np.abs(model - empirical)))


def gmm_to_dict(g: GaussianMixture) -> dict:
    return {"clusters": [{"alpha": c.alpha, "mu": c.mu, "sigma": c.sigma} for c in g.clusters]}


def gmm_to_json(g: GaussianMixture) -> str:
    return json.dumps(gmm_to_dict(g), indent=2) + "\n"


def gmm_from_json(text: str) -> GaussianMixture:
    """Parse ``{"clusters": [{"alpha", "mu", "sigma"}, ...]}``.

    Raises:
        FormatError: If the document is not a valid mixture
    """
    try:
        data = json.loads(text)
        return GaussianMixture(
            tuple(GaussianComponent(float(c["alpha"]), float(c["mu"]), float(c["sigma"])) for c in data["clusters"])
        )
    except (ValueError, KeyError, TypeError) as e:
        raise FormatError(f"invalid mixture document: {e}")


def fit_report_csv(g: GaussianMixture, clusters: Optional[Sequence[np.ndarray]] = None) -> str:
    """Per-cluster rows ``cluster,alpha,mu,sigma,count`` (count blank without clusters)."""
    lines = [REPORT_HEADER]
    for idx, c in enumerate(g.clusters):
        count = "" if clusters is None else str(len(clusters[idx]))
        lines.append(f"{idx},{c.alpha!r},{c.mu!r},{c.sigma!r},{count}")
    return "\n".join(lines) + "\n"
