"""Inference, confusion metrics, visitation maps, Dice and evaluation reports."""

from tractparcel.evaluation.inference import PredictionResult, predict_labels, write_predictions
from tractparcel.evaluation.metrics import (
    ConfusionCounts,
    EvaluationError,
    confusion_counts,
    precision_recall,
)
from tractparcel.evaluation.report import (
    EvaluationReport,
    evaluate_report,
    format_report,
    parse_report,
    write_report,
)
from tractparcel.evaluation.visitation import VisitationMap, dice_score, voxelize_streamlines

__all__ = [
    "ConfusionCounts",
    "EvaluationError",
    "confusion_counts",
    "precision_recall",
    "VisitationMap",
    "voxelize_streamlines",
    "dice_score",
    "PredictionResult",
    "predict_labels",
    "write_predictions",
    "EvaluationReport",
    "evaluate_report",
    "format_report",
    "write_report",
    "parse_report",
]
