"""Planar rigid transforms and the closed-form least-squares fit between point sets."""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ...shared.errors import DegenerateRegistrationError


@dataclass(frozen=True)
class Transform2D:
    """Rotation by ``theta`` radians followed by translation (tx, ty)."""

    theta: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    @classmethod
    def identity(cls) -> "Transform2D":
        return cls()

    @classmethod
    def from_matrix(cls, rotation: np.ndarray, translation: np.ndarray) -> "Transform2D":
        return cls(math.atan2(rotation[1, 0], rotation[0, 0]), float(translation[0]), float(translation[1]))

    @property
    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s], [s, c]])

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty])

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform an (n, 2) array (or a single point)."""
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation

    def compose(self, other: "Transform2D") -> "Transform2D":
        """``self`` after ``other``."""
        rotation = self.rotation
        return Transform2D.from_matrix(rotation @ other.rotation, rotation @ other.translation + self.translation)

    def inverse(self) -> "Transform2D":
        rot_t = self.rotation.T
        return Transform2D.from_matrix(rot_t, -rot_t @ self.translation)

    def as_dict(self) -> dict:
        return {"theta": self.theta, "tx": self.tx, "ty": self.ty}


def best_fit_transform(source: np.ndarray, target: np.ndarray, weights: Optional[np.ndarray] = None) -> Transform2D:
    """Least-squares rigid transform mapping ``source`` points onto corresponding ``target`` points.

    Args:
        source: (n, 2) points
        target: (n, 2) corresponding points
        weights: Optional non-negative per-pair weights

    Returns:
        Transform2D: The optimal rotation and translation (no reflection)
    """
    source = np.asarray(source, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if source.shape != target.shape or source.ndim != 2 or source.shape[0] == 0:
        raise DegenerateRegistrationError(f"need matching non-empty point sets, got {source.shape} and {target.shape}")
    w = np.ones(source.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
    if not w.sum() > 0:
        raise DegenerateRegistrationError("pair weights sum to zero")
    w = w / w.sum()
    centroid_s = w @ source
    centroid_t = w @ target
    h = (source - centroid_s).T @ ((target - centroid_t) * w[:, None])
    u, _, vt = np.linalg.svd(h)
    rotation = vt.T @ u.T
    if np.linalg.det(rotation) < 0:
        vt[-1, :] *= -1
        rotation = vt.T @ u.T
    return Transform2D.from_matrix(rotation, centroid_t - rotation @ centroid_s)
