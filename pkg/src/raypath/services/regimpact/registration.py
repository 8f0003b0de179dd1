"""Two registrars for planar point clouds.

ICP pairs every current point with its nearest reference point (pairs beyond
``r_max`` dropped) and solves the rigid fit of the pairs. NDT-lite bins both
clouds into square voxels and aligns per-voxel centroids over the voxels
populated in both.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.spatial import cKDTree

from .transform import Transform2D, best_fit_transform
from ...shared.errors import DegenerateRegistrationError, InvalidArgumentError

logger = logging.getLogger(__name__)

CONVERGENCE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class IcpParams:
    r_max: float = 0.5
    iterations: int = 30

    def __post_init__(self):
        if not self.r_max > 0 or self.iterations < 1:
            raise InvalidArgumentError(f"ICP needs r_max > 0 and iterations >= 1, got {self}")


@dataclass(frozen=True)
class NdtParams:
    voxel_size: float = 1.0
    iterations: int = 30

    def __post_init__(self):
        if not self.voxel_size > 0 or self.iterations < 1:
            raise InvalidArgumentError(f"NDT needs voxel_size > 0 and iterations >= 1, got {self}")


@dataclass
class RegistrationResult:
    """Estimate, truth and the translation error at the current cloud's centroid."""

    estimate: Transform2D
    truth: Transform2D
    error: float
    iterations: int
    trace: List[float] = field(default_factory=list)


def translation_error(estimate: Transform2D, truth: Transform2D, current: np.ndarray) -> float:
    """Distance between where the estimate and the truth put the current cloud's centroid."""
    centroid = np.mean(current, axis=0)
    return float(np.linalg.norm(estimate.apply(centroid) - truth.apply(centroid)))


def _converged(previous: Transform2D, estimate: Transform2D) -> bool:
    delta = np.abs(np.array([estimate.theta - previous.theta, estimate.tx - previous.tx, estimate.ty - previous.ty]))
    return bool(np.all(delta < CONVERGENCE_TOLERANCE))


def _check_clouds(current: np.ndarray, reference: np.ndarray):
    current = np.asarray(current, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if current.ndim != 2 or reference.ndim != 2 or current.shape[1:] != (2,) or reference.shape[1:] != (2,):
        raise InvalidArgumentError("clouds must be (n, 2) arrays")
    if len(current) == 0 or len(reference) == 0:
        raise DegenerateRegistrationError("both clouds must be non-empty")
    return current, reference


def run_icp(
    current: np.ndarray,
    reference: np.ndarray,
    params: IcpParams = IcpParams(),
    truth: Optional[Transform2D] = None,
    initial: Optional[Transform2D] = None,
) -> RegistrationResult:
    """Iterative closest point from ``initial`` (identity by default).

    The trace holds the matched-pair RMS after each iteration's alignment.

    Raises:
        DegenerateRegistrationError: If an iteration finds no pair within r_max
    """
    current, reference = _check_clouds(current, reference)
    truth = truth or Transform2D.identity()
    tree = cKDTree(reference)
    estimate = initial or Transform2D.identity()
    trace = []
    iteration = 0
    for iteration in range(1, params.iterations + 1):
        distances, indices = tree.query(estimate.apply(current), distance_upper_bound=params.r_max)
        matched = np.isfinite(distances)
        if not np.any(matched):
            raise DegenerateRegistrationError(f"no current point within r_max={params.r_max} of the reference")
        source, target = current[matched], reference[indices[matched]]
        previous, estimate = estimate, best_fit_transform(source, target)
        residual = estimate.apply(source) - target
        trace.append(float(np.sqrt(np.mean(np.sum(residual * residual, axis=1)))))
        logger.debug("icp iteration %d: %d pairs, rms %.3g", iteration, int(matched.sum()), trace[-1])
        if _converged(previous, estimate):
            break
    return RegistrationResult(estimate, truth, translation_error(estimate, truth, current), iteration, trace)


def _voxel_centroids(points: np.ndarray, keys: np.ndarray):
    """Unique voxel keys, per-voxel centroid of ``points`` and per-voxel counts."""
    unique, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    sums = np.zeros((len(unique), 2))
    np.add.at(sums, inverse, points)
    return unique, sums / counts[:, None], counts


def _voxel_keys(points: np.ndarray, voxel_size: float) -> np.ndarray:
    return np.floor(points / voxel_size).astype(np.int64)


def run_ndt_lite(
    current: np.ndarray,
    reference: np.ndarray,
    params: NdtParams = NdtParams(),
    truth: Optional[Transform2D] = None,
    initial: Optional[Transform2D] = None,
) -> RegistrationResult:
    """Voxel-centroid alignment.

    Each iteration bins the current cloud as placed by the estimate, pairs
    each voxel's current centroid with the reference centroid of the same
    voxel, and refits the transform weighted by the current point counts. The
    trace holds the weighted centroid RMS after each iteration.

    Raises:
        DegenerateRegistrationError: If no voxel is populated in both clouds
    """
    current, reference = _check_clouds(current, reference)
    truth = truth or Transform2D.identity()
    ref_keys, ref_centroids, _ = _voxel_centroids(reference, _voxel_keys(reference, params.voxel_size))
    ref_index = {tuple(k): idx for idx, k in enumerate(ref_keys)}
    estimate = initial or Transform2D.identity()
    trace = []
    iteration = 0
    for iteration in range(1, params.iterations + 1):
        keys, centroids, counts = _voxel_centroids(current, _voxel_keys(estimate.apply(current), params.voxel_size))
        common = [(idx, ref_index[tuple(k)]) for idx, k in enumerate(keys) if tuple(k) in ref_index]
        if not common:
            raise DegenerateRegistrationError(f"no voxel of size {params.voxel_size} is populated in both clouds")
        cur_idx, ref_idx = (np.array(v) for v in zip(*common))
        source, target, weights = centroids[cur_idx], ref_centroids[ref_idx], counts[cur_idx]
        previous, estimate = estimate, best_fit_transform(source, target, weights)
        residual = estimate.apply(source) - target
        trace.append(float(np.sqrt(np.average(np.sum(residual * residual, axis=1), weights=weights))))
        logger.debug("ndt iteration %d: %d common voxels, rms %.3g", iteration, len(common), trace[-1])
        if _converged(previous, estimate):
            break
    return RegistrationResult(estimate, truth, translation_error(estimate, truth, current), iteration, trace)
