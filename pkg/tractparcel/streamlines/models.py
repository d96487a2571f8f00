"""Pydantic v2 models for streamlines, streamline sets and their transforms."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

_STRICT_CONFIG = ConfigDict(extra="forbid", frozen=True)
_ARRAY_CONFIG = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

Point3 = tuple[float, float, float]

NO_LABEL = "-"


def _validate_name(name: str) -> str:
    if not name or name == NO_LABEL or any(ch.isspace() for ch in name):
        raise ValueError(f"invalid name {name!r}: must be non-empty, not '-', without whitespace")
    return name


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Streamline(BaseModel):
    """One fiber trajectory: an ordered polyline of 3D points.

    Points are stored as a read-only ``(m, 3)`` float64 array.
    """

    model_config = _ARRAY_CONFIG

    id: int = Field(ge=0)
    points: np.ndarray
    label: str | None = None

    @field_validator("points", mode="before")
    @classmethod
    def _as_point_array(cls, v):
        arr = np.array(v, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError(f"points must have shape (m, 3), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError(f"a streamline needs at least 2 points, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points contain non-finite values")
        return _readonly(arr)

    @field_validator("label")
    @classmethod
    def _check_label(cls, v: str | None) -> str | None:
        return None if v is None else _validate_name(v)

    @property
    def num_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def arc_length(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())


class StreamlineSet(BaseModel):
    model_config = _ARRAY_CONFIG

    streamlines: tuple[Streamline, ...] = ()
    source: str = ""

    @model_validator(mode="after")
    def _unique_ids(self) -> "StreamlineSet":
        seen: set[int] = set()
        for s in self.streamlines:
            if s.id in seen:
                raise ValueError(f"duplicate streamline id {s.id}")
            seen.add(s.id)
        return self

    def __len__(self) -> int:
        return len(self.streamlines)

    @property
    def ids(self) -> list[int]:
        return [s.id for s in self.streamlines]

    def labels(self) -> list[str]:
        """Distinct bundle labels, sorted."""
        return sorted({s.label for s in self.streamlines if s.label is not None})

    def by_label(self, label: str) -> list[Streamline]:
        return [s for s in self.streamlines if s.label == label]

    def subset(self, ids: set[int] | list[int], source: str | None = None) -> "StreamlineSet":
        """Streamlines whose id is in ``ids``, in original order."""
        keep = set(ids)
        return StreamlineSet(
            streamlines=tuple(s for s in self.streamlines if s.id in keep),
            source=self.source if source is None else source,
        )


class NormalizationTransform(BaseModel):
    """Per-axis affine map ``(v - offset) * scale`` into [-1, 1]^3."""

    model_config = _STRICT_CONFIG

    offset: Point3 = (0.0, 0.0, 0.0)
    scale: Point3 = (1.0, 1.0, 1.0)

    @field_validator("offset", "scale")
    @classmethod
    def _finite(cls, v: Point3) -> Point3:
        if not all(np.isfinite(v)):
            raise ValueError("transform components must be finite")
        return v

    @field_validator("scale")
    @classmethod
    def _positive_scale(cls, v: Point3) -> Point3:
        if any(c <= 0 for c in v):
            raise ValueError(f"scales must be strictly positive, got {v}")
        return v

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        return (points - np.asarray(self.offset)) * np.asarray(self.scale)

    def invert_points(self, points: np.ndarray) -> np.ndarray:
        return points / np.asarray(self.scale) + np.asarray(self.offset)


class BundleSpec(BaseModel):
    model_config = _STRICT_CONFIG

    name: str
    family: Literal["helix", "arc", "sine"]
    center: Point3
    size: float = Field(gt=0)
    count: int = Field(ge=1)

    @field_validator("name")
    @classmethod
    def _check_name(cls, v: str) -> str:
        return _validate_name(v)


class SyntheticSpec(BaseModel):
    """Recipe for a deterministic synthetic bundle dataset."""

    model_config = _STRICT_CONFIG

    seed: int = Field(default=0, ge=0, lt=2**64)
    bundles: tuple[BundleSpec, ...]
    noise_sigma: float = Field(default=0.0, ge=0)
    points_per_streamline: int = Field(default=50, ge=2)
    # centre jitter per streamline, as a fraction of the bundle size
    spread: float = Field(default=0.1, ge=0)

    @model_validator(mode="after")
    def _unique_names(self) -> "SyntheticSpec":
        names = [b.name for b in self.bundles]
        if len(set(names)) != len(names):
            raise ValueError(f"bundle names must be unique, got {names}")
        return self
