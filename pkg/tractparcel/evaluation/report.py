"""Per-bundle, per-subject evaluation and the plain-text report format.

One line per (bundle, subject)::

    <bundle> <subject> <TP> <FP> <FN> <TN> <precision> <recall> <dice>

followed, for each bundle, by ``<bundle> MEAN <p> <r> <d>`` and ``<bundle> SD <p> <r> <d>``.
Floats use 6 significant digits; undefined values print as ``nan``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from tractparcel.evaluation.inference import predict_labels
from tractparcel.evaluation.metrics import (
    ConfusionCounts,
    EvaluationError,
    confusion_counts,
    precision_recall,
)
from tractparcel.evaluation.visitation import dice_score, voxelize_streamlines
from tractparcel.gcnn.params import GcnnModel
from tractparcel.streamlines.io import write_text_atomic
from tractparcel.streamlines.models import StreamlineSet

logger = logging.getLogger(__name__)

_STRICT_CONFIG = ConfigDict(extra="forbid", frozen=True)


class SubjectResult(BaseModel):
    model_config = _STRICT_CONFIG

    bundle: str
    subject: str
    counts: ConfusionCounts
    precision: float | None
    recall: float | None
    dice: float


class Aggregate(BaseModel):
    """Mean or population SD across subjects; ``nan`` when no subject defines the value."""

    model_config = _STRICT_CONFIG

    bundle: str
    kind: Literal["MEAN", "SD"]
    precision: float
    recall: float
    dice: float


class EvaluationReport(BaseModel):
    model_config = _STRICT_CONFIG

    results: tuple[SubjectResult, ...] = ()
    aggregates: tuple[Aggregate, ...] = ()

    @property
    def bundles(self) -> list[str]:
        return list(dict.fromkeys(r.bundle for r in self.results))

    def for_bundle(self, bundle: str) -> list[SubjectResult]:
        return [r for r in self.results if r.bundle == bundle]

    def aggregate(self, bundle: str, kind: str) -> Aggregate:
        for a in self.aggregates:
            if a.bundle == bundle and a.kind == kind:
                return a
        raise KeyError(f"no {kind} aggregate for bundle {bundle!r}")


def _mean_sd(values: list[float | None]) -> tuple[float, float]:
    defined = [v for v in values if v is not None and not math.isnan(v)]
    if not defined:
        return math.nan, math.nan
    return float(np.mean(defined)), float(np.std(defined))


def aggregate_results(results: Sequence[SubjectResult]) -> tuple[Aggregate, ...]:
    out = []
    for bundle in dict.fromkeys(r.bundle for r in results):
        rows = [r for r in results if r.bundle == bundle]
        (pm, ps), (rm, rs), (dm, ds) = (
            _mean_sd([getattr(r, field) for r in rows]) for field in ("precision", "recall", "dice")
        )
        out.append(Aggregate(bundle=bundle, kind="MEAN", precision=pm, recall=rm, dice=dm))
        out.append(Aggregate(bundle=bundle, kind="SD", precision=ps, recall=rs, dice=ds))
    return tuple(out)


def evaluate_report(
    models: Sequence[GcnnModel],
    test_sets: Mapping[str, StreamlineSet],
    voxel_size: float,
    threshold: float = 0.5,
    batch_size: int = 256,
) -> EvaluationReport:
    """Predict every subject with every bundle model and score against the set labels.

    Bundles and subjects are processed in sorted order.
    """
    present = {label for st in test_sets.values() for label in st.labels()}
    for model in models:
        if model.bundle not in present:
            raise EvaluationError(f"bundle {model.bundle!r} does not appear in the ground-truth labels")
    names = [m.bundle for m in models]
    if len(set(names)) != len(names):
        raise EvaluationError(f"more than one model per bundle: {names}")

    results = []
    for model in sorted(models, key=lambda m: m.bundle):
        for subject in sorted(test_sets):
            st = test_sets[subject]
            prediction = predict_labels(model, st, threshold=threshold, batch_size=batch_size)
            by_id = {s.id: s for s in st.streamlines}
            truth = {sid: int(by_id[sid].label == model.bundle) for sid in prediction.ids}
            counts = confusion_counts(prediction.label_map(), truth)
            precision, recall = precision_recall(counts)

            predicted_map = voxelize_streamlines((by_id[sid] for sid in prediction.positive_ids), voxel_size)
            truth_map = voxelize_streamlines(st.by_label(model.bundle), voxel_size)
            dice = dice_score(predicted_map, truth_map)

            logger.info(
                f"{model.bundle} / {subject}: TP={counts.tp} FP={counts.fp} FN={counts.fn} TN={counts.tn} "
                f"precision={precision} recall={recall} dice={dice:.4f}"
            )
            results.append(
                SubjectResult(
                    bundle=model.bundle,
                    subject=subject,
                    counts=counts,
                    precision=precision,
                    recall=recall,
                    dice=dice,
                )
            )
    return EvaluationReport(results=tuple(results), aggregates=aggregate_results(results))


def _fmt(value: float | None) -> str:
    return "nan" if value is None or math.isnan(value) else f"{value:.6g}"


def format_report(report: EvaluationReport) -> str:
    lines = []
    for bundle in report.bundles:
        for r in report.for_bundle(bundle):
            c = r.counts
            lines.append(
                f"{r.bundle} {r.subject} {c.tp} {c.fp} {c.fn} {c.tn} "
                f"{_fmt(r.precision)} {_fmt(r.recall)} {_fmt(r.dice)}"
            )
        for kind in ("MEAN", "SD"):
            a = report.aggregate(bundle, kind)
            lines.append(f"{bundle} {kind} {_fmt(a.precision)} {_fmt(a.recall)} {_fmt(a.dice)}")
    return "".join(line + "\n" for line in lines)


def write_report(report: EvaluationReport, path: str | Path) -> None:
    write_text_atomic(path, format_report(report))
    logger.info(f"Wrote evaluation report for {len(report.bundles)} bundles to {path}")


def _parse_value(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise EvaluationError(f"line {lineno}: invalid number {token!r}") from None


def parse_report(text: str) -> EvaluationReport:
    """Read a report back; subject lines have 9 fields and aggregate lines 5."""
    results, aggregates = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) == 5 and tokens[1] in ("MEAN", "SD"):
            p, r, d = (_parse_value(t, lineno) for t in tokens[2:])
            aggregates.append(Aggregate(bundle=tokens[0], kind=tokens[1], precision=p, recall=r, dice=d))
        elif len(tokens) == 9:
            try:
                tp, fp, fn, tn = (int(t) for t in tokens[2:6])
            except ValueError:
                raise EvaluationError(f"line {lineno}: invalid count in {line!r}") from None
            p, r, d = (_parse_value(t, lineno) for t in tokens[6:])
            results.append(
                SubjectResult(
                    bundle=tokens[0],
                    subject=tokens[1],
                    counts=ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn),
                    precision=None if math.isnan(p) else p,
                    recall=None if math.isnan(r) else r,
                    dice=d,
                )
            )
        else:
            raise EvaluationError(f"line {lineno}: expected 5 or 9 fields, got {len(tokens)}")
    return EvaluationReport(results=tuple(results), aggregates=tuple(aggregates))
