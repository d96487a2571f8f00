"""Confusion counts and precision/recall."""

from __future__ import annotations

from collections.abc import Mapping

from pydantic import BaseModel, ConfigDict, Field


class EvaluationError(ValueError):
    pass


class ConfusionCounts(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    tp: int = Field(ge=0)
    fp: int = Field(ge=0)
    fn: int = Field(ge=0)
    tn: int = Field(ge=0)

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def predicted_positives(self) -> int:
        return self.tp + self.fp

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion_counts(predicted: Mapping[int, int], truth: Mapping[int, int]) -> ConfusionCounts:
    """2x2 tally of 0/1 labels keyed by streamline id; both maps must share their ids."""
    if set(predicted) != set(truth):
        missing = sorted(set(truth) - set(predicted))[:5]
        extra = sorted(set(predicted) - set(truth))[:5]
        raise EvaluationError(f"prediction/truth id mismatch (missing {missing}, unexpected {extra})")
    tp = fp = fn = tn = 0
    for sid, p in predicted.items():
        t = truth[sid]
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def precision_recall(c: ConfusionCounts) -> tuple[float | None, float | None]:
    """``None`` marks an undefined ratio (zero denominator)."""
    precision = c.tp / c.predicted_positives if c.predicted_positives else None
    recall = c.tp / c.positives if c.positives else None
    return precision, recall
