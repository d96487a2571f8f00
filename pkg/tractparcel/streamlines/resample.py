"""Arc-length resampling and coordinate normalization of streamlines."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from tractparcel.streamlines.models import NormalizationTransform, Streamline, StreamlineSet


class DegenerateStreamlineError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


def cumulative_arc_length(points: np.ndarray) -> np.ndarray:
    """Arc length from the first point to every point of the polyline."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return np.concatenate(([0.0], np.cumsum(seg)))


def resample_uniform(s: Streamline, n: int) -> Streamline:
    """Resample ``s`` to ``n`` points equally spaced in arc length.

    Interpolation is piecewise linear along the original polyline. The first and
    last output points are the original endpoints, bit for bit.
    """
    if n < 2:
        raise DegenerateStreamlineError(f"cannot resample to {n} points, need n >= 2")

    points = s.points
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    # zero-length segments would make the arc-length axis non-increasing
    keep = np.concatenate(([True], seg > 0))
    points = points[keep]
    cum = cumulative_arc_length(points)
    total = cum[-1]
    if not total > 0:
        raise DegenerateStreamlineError(f"streamline {s.id} has zero arc length")

    targets = np.linspace(0.0, total, n)
    out = np.column_stack([np.interp(targets, cum, points[:, axis]) for axis in range(3)])
    out[0] = s.points[0]
    out[-1] = s.points[-1]
    return s.model_copy(update={"points": _frozen(out)})


def fit_normalization(sets: Iterable[StreamlineSet]) -> NormalizationTransform:
    """Affine transform mapping the bounding box of all points onto [-1, 1]^3.

    Axes with zero extent map to 0 with unit scale.
    """
    blocks = [s.points for st in sets for s in st.streamlines]
    if not blocks:
        raise NormalizationError("cannot fit a normalization on an empty input")
    allpts = np.concatenate(blocks, axis=0)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    extent = hi - lo
    offset = np.where(extent > 0, (lo + hi) / 2.0, lo)
    scale = np.where(extent > 0, 2.0 / np.where(extent > 0, extent, 1.0), 1.0)
    return NormalizationTransform(
        offset=tuple(float(v) for v in offset), scale=tuple(float(v) for v in scale)
    )


def apply_normalization(t: NormalizationTransform, s: Streamline) -> Streamline:
    return s.model_copy(update={"points": _frozen(t.apply_points(s.points))})


def invert_normalization(t: NormalizationTransform, s: Streamline) -> Streamline:
    return s.model_copy(update={"points": _frozen(t.invert_points(s.points))})


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr
