"""Voxelized visitation maps and Dice overlap."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from tractparcel.evaluation.metrics import EvaluationError
from tractparcel.streamlines.models import Streamline

Voxel = tuple[int, int, int]


class VisitationMap(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    voxel_size: float = Field(gt=0)
    voxels: frozenset[Voxel] = frozenset()

    def __len__(self) -> int:
        return len(self.voxels)


def supersample(points: np.ndarray, step: float) -> np.ndarray:
    """Points along the polyline spaced at most ``step`` apart, vertices included."""
    seg = np.diff(points, axis=0)
    lengths = np.linalg.norm(seg, axis=1)
    per_segment = np.maximum(1, np.ceil(lengths / step)).astype(np.int64)
    seg_idx = np.repeat(np.arange(len(seg)), per_segment)
    within = np.arange(per_segment.sum()) - np.repeat(np.cumsum(per_segment) - per_segment, per_segment)
    t = within / per_segment[seg_idx]
    samples = points[seg_idx] + t[:, None] * seg[seg_idx]
    return np.vstack([samples, points[-1:]])


def voxelize_streamlines(
    streamlines: Iterable[Streamline], voxel_size: float, step: float | None = None
) -> VisitationMap:
    """Union of voxels ``floor(p / v)`` hit by supersampled segment points.

    ``step`` defaults to half the voxel size and may not exceed it.
    """
    if not voxel_size > 0:
        raise EvaluationError(f"voxel size must be positive, got {voxel_size}")
    step = voxel_size / 2.0 if step is None else step
    if not 0 < step <= voxel_size / 2.0:
        raise EvaluationError(f"supersampling step must lie in (0, {voxel_size / 2.0}], got {step}")

    blocks = [np.floor(supersample(s.points, step) / voxel_size).astype(np.int64) for s in streamlines]
    if not blocks:
        return VisitationMap(voxel_size=voxel_size)
    unique = np.unique(np.concatenate(blocks), axis=0)
    return VisitationMap(voxel_size=voxel_size, voxels=frozenset(map(tuple, unique.tolist())))


def dice_score(a: VisitationMap, b: VisitationMap) -> float:
    """``2|A & B| / (|A| + |B|)``; two empty maps score 1.0."""
    if a.voxel_size != b.voxel_size:
        raise EvaluationError(f"voxel sizes differ: {a.voxel_size} vs {b.voxel_size}")
    if not a.voxels and not b.voxels:
        return 1.0
    return 2.0 * len(a.voxels & b.voxels) / (len(a.voxels) + len(b.voxels))
