"""Applying a trained bundle model to a streamline set."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from tractparcel.gcnn.network import predict_proba
from tractparcel.gcnn.params import GcnnModel
from tractparcel.quality.checks import partition_valid
from tractparcel.streamlines.io import write_text_atomic
from tractparcel.streamlines.models import StreamlineSet
from tractparcel.training.dataset import encode_streamlines

logger = logging.getLogger(__name__)


class PredictionResult(BaseModel):
    """Per-streamline class-1 probabilities and thresholded labels, in input order."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    bundle: str
    threshold: float = Field(ge=0, le=1)
    ids: tuple[int, ...] = ()
    probabilities: tuple[float, ...] = ()
    labels: tuple[int, ...] = ()
    skipped: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.ids)

    def label_map(self) -> dict[int, int]:
        return dict(zip(self.ids, self.labels))

    @property
    def positive_ids(self) -> list[int]:
        return [sid for sid, label in zip(self.ids, self.labels) if label == 1]


def predict_labels(
    model: GcnnModel, streamline_set: StreamlineSet, threshold: float = 0.5, batch_size: int = 256
) -> PredictionResult:
    """Label a streamline positive iff its class-1 probability is at least ``threshold``.

    Streamlines failing the quality gate are skipped and listed in ``skipped``.
    """
    valid, rejected = partition_valid(streamline_set)
    skipped = tuple(sid for sid, _ in rejected)
    if skipped:
        logger.warning(f"Skipped {len(skipped)} degenerate streamlines: {list(skipped)}")

    probabilities = []
    for start in range(0, len(valid), batch_size):
        batch = encode_streamlines(valid[start : start + batch_size], model.hierarchy, model.normalization)
        probabilities.append(predict_proba(model, batch))
    probs = np.concatenate(probabilities) if probabilities else np.zeros(0)
    labels = (probs >= threshold).astype(np.int64)

    logger.info(
        f"Predicted {len(valid)} streamlines for {model.bundle!r}: {int(labels.sum())} positive, "
        f"{len(skipped)} skipped"
    )
    return PredictionResult(
        bundle=model.bundle,
        threshold=threshold,
        ids=tuple(s.id for s in valid),
        probabilities=tuple(float(p) for p in probs),
        labels=tuple(int(v) for v in labels),
        skipped=skipped,
    )


def format_predictions(result: PredictionResult) -> str:
    lines = [f"{sid} {p:.6g} {label}" for sid, p, label in zip(result.ids, result.probabilities, result.labels)]
    lines.extend(f"# skipped {sid}" for sid in result.skipped)
    return "".join(line + "\n" for line in lines)


def write_predictions(result: PredictionResult, path: str | Path) -> None:
    """``id probability label`` per line, then ``# skipped <id>`` lines."""
    write_text_atomic(path, format_predictions(result))
    logger.debug(f"Wrote {len(result)} predictions to {path}")
