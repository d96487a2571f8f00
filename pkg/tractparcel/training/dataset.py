"""Binary (bundle vs. rest) datasets built from labelled streamline sets."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from tractparcel.graph.coarsening import CoarseningHierarchy, permute_signal, unpermute_signal
from tractparcel.quality.checks import partition_valid
from tractparcel.streamlines.models import NormalizationTransform, Streamline, StreamlineSet
from tractparcel.streamlines.resample import resample_uniform

logger = logging.getLogger(__name__)


class DatasetError(ValueError):
    pass


class BinaryDataset(BaseModel):
    """Network-ready samples: ``(N, k, 3)`` permuted, padded coordinate matrices."""

    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    samples: np.ndarray
    labels: np.ndarray
    source_ids: np.ndarray
    bundle: str
    normalization: NormalizationTransform

    @model_validator(mode="after")
    def _consistent(self) -> "BinaryDataset":
        n = self.samples.shape[0]
        if self.samples.ndim != 3 or self.samples.shape[2] != 3:
            raise ValueError(f"samples must be (N, k, 3), got {self.samples.shape}")
        if self.labels.shape != (n,) or self.source_ids.shape != (n,):
            raise ValueError("labels and source ids must have one entry per sample")
        if not np.all(np.isin(self.labels, (0, 1))):
            raise ValueError("labels must be 0 or 1")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain non-finite values")
        return self

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def padded_length(self) -> int:
        return int(self.samples.shape[1])

    @property
    def class_counts(self) -> tuple[int, int]:
        """``(negatives, positives)``."""
        positives = int(self.labels.sum())
        return len(self) - positives, positives


def encode_streamlines(
    streamlines: list[Streamline], hierarchy: CoarseningHierarchy, normalization: NormalizationTransform
) -> np.ndarray:
    """Resample, normalize and permute streamlines into a ``(N, k, 3)`` batch."""
    if not streamlines:
        return np.zeros((0, hierarchy.padded_length, 3))
    rows = [
        normalization.apply_points(resample_uniform(s, hierarchy.num_nodes).points) for s in streamlines
    ]
    return permute_signal(hierarchy, np.stack(rows))


def bounding_box(streamlines: list[Streamline]) -> tuple[np.ndarray, np.ndarray]:
    allpts = np.concatenate([s.points for s in streamlines], axis=0)
    return allpts.min(axis=0), allpts.max(axis=0)


def boxes_intersect(a: tuple[np.ndarray, np.ndarray], b: tuple[np.ndarray, np.ndarray], margin: float = 0.0) -> bool:
    """Axis-aligned boxes overlap (touching counts) after growing ``a`` by ``margin``."""
    return bool(np.all(a[0] - margin <= b[1]) and np.all(b[0] <= a[1] + margin))


def _draw(rng: np.random.Generator, pool: list[Streamline], count: int) -> list[Streamline]:
    if count == 0:
        return []
    picks = np.sort(rng.choice(len(pool), size=count, replace=False))
    return [pool[i] for i in picks]


def assemble_binary_dataset(
    all_streamlines: StreamlineSet,
    target: str,
    hierarchy: CoarseningHierarchy,
    normalization: NormalizationTransform,
    seed: int = 0,
    neighbor_margin: float = 0.0,
) -> BinaryDataset:
    """Positives are all ``target`` streamlines; negatives are sampled in two groups.

    Neighbour negatives: up to N_pos streamlines drawn without replacement from bundles
    whose bounding box intersects the target's. Random negatives: ``min(N_pos, available)``
    streamlines drawn from every other non-target streamline. Samples are ordered
    positives, neighbour negatives, random negatives.
    """
    valid, rejected = partition_valid(all_streamlines, require_label=True)
    if rejected:
        logger.warning(f"Dropped {len(rejected)} streamlines failing quality checks: {[r[0] for r in rejected]}")

    positives = [s for s in valid if s.label == target]
    if not positives:
        raise DatasetError(f"target bundle {target!r} is absent or empty")
    n_pos = len(positives)

    target_box = bounding_box(positives)
    neighbours = []
    for label in sorted({s.label for s in valid} - {target}):
        members = [s for s in valid if s.label == label]
        if boxes_intersect(target_box, bounding_box(members), neighbor_margin):
            neighbours.append(label)
    neighbour_pool = [s for s in valid if s.label in neighbours]

    rng = np.random.default_rng(seed)
    neighbour_negatives = _draw(rng, neighbour_pool, min(n_pos, len(neighbour_pool)))
    taken = {s.id for s in neighbour_negatives}
    random_pool = [s for s in valid if s.label != target and s.id not in taken]
    random_negatives = _draw(rng, random_pool, min(n_pos, len(random_pool)))

    chosen = positives + neighbour_negatives + random_negatives
    labels = np.array([1] * n_pos + [0] * (len(chosen) - n_pos), dtype=np.int64)
    logger.info(
        f"Assembled dataset for {target!r}: {n_pos} positives, "
        f"{len(neighbour_negatives)} neighbour negatives (bundles {neighbours}), "
        f"{len(random_negatives)} random negatives"
    )
    return BinaryDataset(
        samples=encode_streamlines(chosen, hierarchy, normalization),
        labels=labels,
        source_ids=np.array([s.id for s in chosen], dtype=np.int64),
        bundle=target,
        normalization=normalization,
    )


def augment_reversed(dataset: BinaryDataset, hierarchy: CoarseningHierarchy) -> BinaryDataset:
    """Append every sample with its node order reversed; labels and ids are repeated."""
    if dataset.padded_length != hierarchy.padded_length:
        raise DatasetError(
            f"dataset padded length {dataset.padded_length} does not match hierarchy {hierarchy.padded_length}"
        )
    flipped = permute_signal(hierarchy, unpermute_signal(hierarchy, dataset.samples)[:, ::-1, :])
    return dataset.model_copy(
        update={
            "samples": np.concatenate([dataset.samples, flipped]),
            "labels": np.concatenate([dataset.labels, dataset.labels]),
            "source_ids": np.concatenate([dataset.source_ids, dataset.source_ids]),
        }
    )


def split_validation(
    streamline_set: StreamlineSet, val_fraction: float, seed: int = 0
) -> tuple[StreamlineSet, StreamlineSet]:
    """Seeded streamline-level shuffle split into ``(train, validation)``.

    The validation part holds ``round(fraction * N)`` streamlines, at least one, and
    never all of them.
    """
    if not 0 < val_fraction < 1:
        raise DatasetError(f"validation fraction must lie in (0, 1), got {val_fraction}")
    n = len(streamline_set)
    if n < 2:
        raise DatasetError(f"need at least 2 streamlines to split, got {n}")
    n_val = min(max(1, int(round(val_fraction * n))), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    ids = streamline_set.ids
    val_ids = {ids[i] for i in order[:n_val]}
    train_ids = set(ids) - val_ids
    return (
        streamline_set.subset(train_ids, source=f"{streamline_set.source}#train"),
        streamline_set.subset(val_ids, source=f"{streamline_set.source}#val"),
    )
