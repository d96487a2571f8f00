"""Pipeline jobs behind the CLI: generate, train, predict and evaluate."""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Any

import numpy as np

from tractparcel.config import settings
from tractparcel.evaluation.inference import predict_labels, write_predictions
from tractparcel.evaluation.metrics import EvaluationError
from tractparcel.evaluation.report import evaluate_report, write_report
from tractparcel.gcnn.params import architecture_for
from tractparcel.graph.coarsening import build_hierarchy
from tractparcel.streamlines.io import parse_streamline_file, write_streamline_file
from tractparcel.streamlines.resample import fit_normalization
from tractparcel.streamlines.synthetic import generate_synthetic_dataset, read_synthetic_spec
from tractparcel.training.dataset import (
    BinaryDataset,
    assemble_binary_dataset,
    split_validation,
)
from tractparcel.training.serialization import deserialize_model, serialize_model
from tractparcel.training.trainer import TrainConfig, train

logger = logging.getLogger(__name__)


def run_generate(spec_path: str | Path, out_path: str | Path, seed: int = 0) -> dict[str, Any]:
    """Generate a synthetic labelled streamline file from a spec file."""
    start_time = time.time()
    spec = read_synthetic_spec(spec_path, seed=seed)
    streamlines = generate_synthetic_dataset(spec)
    write_streamline_file(streamlines, out_path)

    metrics = {
        "bundles": len(spec.bundles),
        "streamlines": len(streamlines),
        "duration_sec": time.time() - start_time,
    }
    logger.info(
        f"Generated {metrics['streamlines']} streamlines in {metrics['bundles']} bundles "
        f"(seed={seed}) -> {out_path}"
    )
    return metrics


def _concat(datasets: list[BinaryDataset]) -> BinaryDataset:
    first = datasets[0]
    return first.model_copy(
        update={
            "samples": np.concatenate([d.samples for d in datasets]),
            "labels": np.concatenate([d.labels for d in datasets]),
            "source_ids": np.concatenate([d.source_ids for d in datasets]),
        }
    )


def run_train(
    data_path: str | Path,
    bundle: str,
    out_path: str | Path,
    config: TrainConfig,
    val_fraction: float | None = None,
    val_paths: list[Path] | None = None,
    conv1_channels: int | None = None,
    conv2_channels: int | None = None,
    fc_units: int | None = None,
    neighbor_margin: float | None = None,
) -> dict[str, Any]:
    """Train one binary model for ``bundle`` and write it as a GCM file.

    Validation uses whole files when ``val_paths`` is given, otherwise a seeded
    streamline-level split of ``data_path``.
    """
    start_time = time.time()
    val_fraction = settings.VAL_FRACTION if val_fraction is None else val_fraction
    neighbor_margin = settings.NEIGHBOR_MARGIN if neighbor_margin is None else neighbor_margin

    everything = parse_streamline_file(data_path)
    if val_paths:
        train_set = everything
        val_sets = [parse_streamline_file(p) for p in val_paths]
    else:
        train_set, val_set = split_validation(everything, val_fraction, seed=config.seed)
        val_sets = [val_set]

    hierarchy = build_hierarchy(settings.RESAMPLE_POINTS, settings.COARSENING_LEVELS)
    architecture = architecture_for(
        hierarchy,
        conv1_channels=conv1_channels or settings.CONV1_CHANNELS,
        conv2_channels=conv2_channels or settings.CONV2_CHANNELS,
        fc_units=fc_units or settings.FC_UNITS,
    )
    normalization = fit_normalization([train_set])

    training = assemble_binary_dataset(
        train_set, bundle, hierarchy, normalization, seed=config.seed, neighbor_margin=neighbor_margin
    )
    validation = _concat(
        [
            assemble_binary_dataset(
                vs, bundle, hierarchy, normalization, seed=config.seed + 1 + i, neighbor_margin=neighbor_margin
            )
            for i, vs in enumerate(val_sets)
        ]
    )

    model, report = train(training, validation, config, hierarchy, architecture)
    serialize_model(model, out_path)

    metrics = {
        "bundle": bundle,
        "train_samples": len(training),
        "val_samples": len(validation),
        "epochs": report.stopping_epoch,
        "best_epoch": report.best_epoch,
        "val_loss": report.best_val_loss,
        "val_accuracy": report.best_val_accuracy,
        "duration_sec": time.time() - start_time,
    }
    logger.info(
        f"Training complete for {bundle!r}: epochs={metrics['epochs']}, best_epoch={metrics['best_epoch']}, "
        f"val_accuracy={metrics['val_accuracy']:.4f}, duration={metrics['duration_sec']:.2f}s"
    )
    return metrics


def run_predict(
    model_path: str | Path,
    data_path: str | Path,
    out_path: str | Path,
    threshold: float | None = None,
) -> dict[str, Any]:
    start_time = time.time()
    threshold = settings.THRESHOLD if threshold is None else threshold
    model = deserialize_model(model_path)
    streamlines = parse_streamline_file(data_path)
    result = predict_labels(model, streamlines, threshold=threshold, batch_size=settings.PREDICT_BATCH_SIZE)
    write_predictions(result, out_path)

    return {
        "bundle": model.bundle,
        "predicted": len(result),
        "positive": len(result.positive_ids),
        "skipped": len(result.skipped),
        "duration_sec": time.time() - start_time,
    }


def run_evaluate(
    model_paths: list[Path],
    data_paths: list[Path],
    out_path: str | Path,
    voxel_size: float | None = None,
    threshold: float | None = None,
) -> dict[str, Any]:
    """Evaluate every model on every subject file (subject name = file stem)."""
    start_time = time.time()
    voxel_size = settings.VOXEL_SIZE if voxel_size is None else voxel_size
    threshold = settings.THRESHOLD if threshold is None else threshold

    subjects = {}
    for path in data_paths:
        name = Path(path).stem
        if name in subjects:
            raise EvaluationError(f"two data files share the subject name {name!r}")
        subjects[name] = parse_streamline_file(path)
    models = [deserialize_model(p) for p in model_paths]

    report = evaluate_report(
        models, subjects, voxel_size, threshold=threshold, batch_size=settings.PREDICT_BATCH_SIZE
    )
    write_report(report, out_path)

    metrics = {
        "bundles": len(report.bundles),
        "subjects": len(subjects),
        "duration_sec": time.time() - start_time,
    }
    for bundle in report.bundles:
        mean = report.aggregate(bundle, "MEAN")
        metrics[bundle] = {"precision": mean.precision, "recall": mean.recall, "dice": mean.dice}
    return metrics
