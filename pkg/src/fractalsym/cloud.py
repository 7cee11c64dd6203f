"""Finite planar point clouds standing in for compact sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PointCloud:
    """Finite sample of a planar compact set.

    points is a 1-D complex128 array; meta records how the cloud was
    generated (seeds, windows, parameters) so runs can be reproduced.
    """

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def translated(self, center: complex) -> "PointCloud":
        return PointCloud(self.points - center, dict(self.meta, translated_by=str(-center)))

    def scaled(self, factor: complex) -> "PointCloud":
        return PointCloud(self.points * factor, dict(self.meta, scaled_by=str(factor)))


def as_points(obj) -> np.ndarray:
    if isinstance(obj, PointCloud):
        return obj.points
    return np.asarray(obj, dtype=complex).ravel()
