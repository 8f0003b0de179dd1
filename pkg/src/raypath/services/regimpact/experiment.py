"""Desk-scale experiments: how two-return raypaths bias scan registration.

A planar scene is scanned twice. A contiguous block of raypaths on the x-wall
sees two surfaces a gap apart along +x; each cloud reports the near or the far
one (a single draw per cloud), or, for a map reference, both.
"""
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, replace
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from .registration import IcpParams, NdtParams, RegistrationResult, run_icp, run_ndt_lite
from .transform import Transform2D
from ...shared.errors import InvalidArgumentError
from ...utils.rng import trial_rng

logger = logging.getLogger(__name__)

SCAN = "scan"
MAP = "map"
REFERENCES = (SCAN, MAP)
ICP = "icp"
NDT = "ndt"
ALGORITHMS = (ICP, NDT)
SCENES = ("corner", "wall")
REPORT_HEADER = "delta,algorithm,reference,mean_bias,std_bias,max_bias,trials"

X_WALL = 4.5
Y_WALL = 7.5
SPACING = 0.25


@dataclass
class RegistrationConfig:
    """One experiment cell plus the registrar parameters."""
    scene: str = "corner"
    gap: float = 0.0
    fraction: float = 0.1
    reference: str = SCAN
    r_max: float = 0.5
    icp_iterations: int = 30
    voxel_size: float = 1.0
    ndt_iterations: int = 30
    noise: float = 0.0
    rotation_deg: float = 0.1
    translation: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.scene not in SCENES:
            raise InvalidArgumentError(f"scene must be one of {', '.join(SCENES)}, got {self.scene!r}")
        if self.reference not in REFERENCES:
            raise InvalidArgumentError(f"reference must be one of {', '.join(REFERENCES)}, got {self.reference!r}")
        if not self.gap >= 0 or not 0.0 <= self.fraction <= 1.0 or not self.noise >= 0:
            raise InvalidArgumentError("gap and noise must be >= 0 and fraction within [0, 1]")
        if self.seed < 0:
            raise InvalidArgumentError(f"seed must be >= 0, got {self.seed}")
        if not self.r_max > 0 or not self.voxel_size > 0:
            raise InvalidArgumentError("r_max and voxel_size must be positive")
        if self.icp_iterations < 1 or self.ndt_iterations < 1:
            raise InvalidArgumentError("iteration caps must be >= 1")

    @property
    def icp_params(self) -> IcpParams:
        return IcpParams(self.r_max, self.icp_iterations)

    @property
    def ndt_params(self) -> NdtParams:
        return NdtParams(self.voxel_size, self.ndt_iterations)

    @classmethod
    def from_dict(cls, data: dict) -> 'RegistrationConfig':
        """Create a RegistrationConfig instance from a dictionary."""
        valid_keys = cls.__dataclass_fields__.keys()
        filtered_data = {k: v for k, v in data.items() if k in valid_keys}
        return cls(**filtered_data)


class Experiment(NamedTuple):
    current: np.ndarray
    reference: np.ndarray
    truth: Transform2D
    designated: int


def scene_points(scene: str = "corner") -> np.ndarray:
    """World points of the planar scene, sensor at the origin.

    The x-wall stands at x = 4.5 and the y-wall at y = 7.5; samples are 0.25
    apart and sit 0.125 inside unit cells.
    """
    x_wall = np.column_stack([np.full(60, X_WALL), -7.375 + SPACING * np.arange(60)])
    if scene == "wall":
        return x_wall
    y_wall = np.column_stack([-5.375 + SPACING * np.arange(40), np.full(40, Y_WALL)])
    return np.vstack([x_wall, y_wall])


def designated_rays(points: np.ndarray, fraction: float) -> np.ndarray:
    """Indices of the contiguous x-wall block (from y = 0.125 upward) that sees two surfaces."""
    count = int(round(fraction * len(points)))
    on_x_wall = np.flatnonzero((points[:, 0] == X_WALL) & (points[:, 1] > 0))
    if count > on_x_wall.size:
        raise InvalidArgumentError(f"cannot designate {count} rays; only {on_x_wall.size} x-wall rays face +y")
    return on_x_wall[:count]


def _scan(points: np.ndarray, block: np.ndarray, gap: float, far: bool) -> np.ndarray:
    scan = points.copy()
    if far:
        scan[block, 0] += gap
    return scan


def make_experiment(cfg: RegistrationConfig, rng: np.random.Generator) -> Experiment:
    """Current cloud, reference cloud and the truth transform taking current into the reference frame.

    Draws happen in a fixed order regardless of the configuration, so the
    same stream yields the same truth and choices for every gap.
    """
    theta = math.radians(cfg.rotation_deg) * rng.uniform(-1.0, 1.0)
    tx, ty = cfg.translation * rng.uniform(-1.0, 1.0, size=2)
    current_far, reference_far = rng.random(2) < 0.5
    points = scene_points(cfg.scene)
    current_noise = rng.standard_normal(points.shape)
    reference_noise = rng.standard_normal(points.shape)
    truth = Transform2D(theta, float(tx), float(ty))

    block = designated_rays(points, cfg.fraction)
    current_world = _scan(points, block, cfg.gap, current_far) + cfg.noise * current_noise
    if cfg.reference == MAP:
        reference = np.vstack([points, _scan(points[block], np.arange(block.size), cfg.gap, True)])
        noise = np.vstack([reference_noise, reference_noise[block]])
        reference = reference + cfg.noise * noise
    else:
        reference = _scan(points, block, cfg.gap, reference_far) + cfg.noise * reference_noise
    current = truth.inverse().apply(current_world)
    return Experiment(current, reference, truth, int(block.size))


def run_trial(cfg: RegistrationConfig, algorithm: str, trial: int) -> RegistrationResult:
    """Build trial ``trial``'s clouds from the configured seed and register them."""
    experiment = make_experiment(cfg, trial_rng(cfg.seed, trial))
    if algorithm == ICP:
        return run_icp(experiment.current, experiment.reference, cfg.icp_params, experiment.truth)
    if algorithm == NDT:
        return run_ndt_lite(experiment.current, experiment.reference, cfg.ndt_params, experiment.truth)
    raise InvalidArgumentError(f"algorithm must be one of {', '.join(ALGORITHMS)}, got {algorithm!r}")


@dataclass(frozen=True)
class BiasRow:
    delta: float
    algorithm: str
    reference: str
    mean_bias: float
    std_bias: float
    max_bias: float
    trials: int

    def as_dict(self) -> Dict:
        return asdict(self)


def _cell(args: Tuple[RegistrationConfig, str, int]) -> BiasRow:
    cfg, algorithm, trials = args
    errors = np.array([run_trial(cfg, algorithm, t).error for t in range(trials)])
    row = BiasRow(
        cfg.gap, algorithm, cfg.reference, float(errors.mean()), float(errors.std()), float(errors.max()), trials
    )
    logger.info("delta=%g %s/%s: mean bias %.4g", row.delta, algorithm, row.reference, row.mean_bias)
    return row


def bias_report(
    cfg: RegistrationConfig,
    deltas: Sequence[float],
    trials: int,
    algorithms: Sequence[str] = ALGORITHMS,
    references: Sequence[str] = REFERENCES,
    workers: int = 1,
) -> List[BiasRow]:
    """Sweep gaps x algorithms x reference kinds; one row per cell, in that nesting order.

    Trial t of every cell uses the stream derived from (seed, t), so rows are
    identical for any worker count.
    """
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise InvalidArgumentError(f"algorithm must be one of {', '.join(ALGORITHMS)}, got {algorithm!r}")
    cells = [
        (replace(cfg, gap=float(delta), reference=reference), algorithm, trials)
        for delta in deltas
        for algorithm in algorithms
        for reference in references
    ]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(cell) for cell in cells]


def report_to_csv(rows: Sequence[BiasRow]) -> str:
    """Report CSV ``delta,algorithm,reference,mean_bias,std_bias,max_bias,trials``."""
    lines = [REPORT_HEADER]
    for r in rows:
        lines.append(
            f"{r.delta!r},{r.algorithm},{r.reference},{r.mean_bias!r},{r.std_bias!r},{r.max_bias!r},{r.trials}"
        )
    return "\n".join(lines) + "\n"
