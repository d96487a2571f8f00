"""Mini-batch training with L2 regularization, early stopping and best-model selection."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tractparcel.gcnn.layers import softmax_cross_entropy
from tractparcel.gcnn.network import forward, l2_penalty, loss_and_gradients
from tractparcel.gcnn.params import WEIGHT_NAMES, Architecture, GcnnModel, Gradients, init_model
from tractparcel.graph.coarsening import CoarseningHierarchy
from tractparcel.training.dataset import BinaryDataset, DatasetError, augment_reversed
from tractparcel.training.optimizer import OptimizerConfig, OptimizerState, optimizer_step

logger = logging.getLogger(__name__)

EVAL_CHUNK = 256


class TrainingError(ValueError):
    def __init__(self, epoch: int, message: str):
        super().__init__(f"epoch {epoch}: {message}")
        self.epoch = epoch


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(default=1e-3, gt=0)
    l2: float = Field(default=1e-4, ge=0)
    batch_size: int = Field(default=64, ge=1)
    max_epochs: int = Field(default=200, ge=1)
    patience: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    reverse_augment: bool = True
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _patience_within_epochs(self) -> "TrainConfig":
        if self.patience > self.max_epochs:
            raise ValueError(f"patience ({self.patience}) exceeds max_epochs ({self.max_epochs})")
        return self

    @classmethod
    def from_settings(cls, settings: Any, **overrides: Any) -> "TrainConfig":
        """Defaults from a ``Settings`` object; ``None`` overrides are ignored.

        A default patience larger than the epoch limit is clamped to it.
        """
        values = {
            "learning_rate": settings.LEARNING_RATE,
            "l2": settings.L2_COEFFICIENT,
            "batch_size": settings.BATCH_SIZE,
            "max_epochs": settings.MAX_EPOCHS,
            "patience": settings.PATIENCE,
            "reverse_augment": settings.REVERSE_AUGMENT,
            "workers": settings.TRAIN_WORKERS,
        }
        given = {k: v for k, v in overrides.items() if v is not None}
        values.update(given)
        if "patience" not in given:
            values["patience"] = min(values["patience"], values["max_epochs"])
        return cls(**values)

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(
            learning_rate=self.learning_rate, beta1=self.beta1, beta2=self.beta2, epsilon=self.epsilon
        )


class TrainReport(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    train_loss: list[float]
    val_loss: list[float]
    val_accuracy: list[float]
    stopping_epoch: int = Field(ge=1)
    best_epoch: int = Field(ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> "TrainReport":
        if not len(self.train_loss) == len(self.val_loss) == len(self.val_accuracy) == self.stopping_epoch:
            raise ValueError("per-epoch histories must have one entry per epoch")
        if self.best_epoch > self.stopping_epoch:
            raise ValueError(f"best epoch {self.best_epoch} after stopping epoch {self.stopping_epoch}")
        return self

    @property
    def best_val_loss(self) -> float:
        return self.val_loss[self.best_epoch - 1]

    @property
    def best_val_accuracy(self) -> float:
        return self.val_accuracy[self.best_epoch - 1]


def evaluate_split(model: GcnnModel, dataset: BinaryDataset) -> tuple[float, float]:
    """Mean cross-entropy (no L2 term) and accuracy of ``model`` on ``dataset``."""
    total_loss, correct = 0.0, 0
    for start in range(0, len(dataset), EVAL_CHUNK):
        xb = dataset.samples[start : start + EVAL_CHUNK]
        yb = dataset.labels[start : start + EVAL_CHUNK]
        logits, _ = forward(model, xb)
        loss, _ = softmax_cross_entropy(logits, yb)
        total_loss += loss * len(yb)
        correct += int(np.sum(np.argmax(logits, axis=1) == yb))
    return total_loss / len(dataset), correct / len(dataset)


def batch_gradients(
    model: GcnnModel,
    xb: np.ndarray,
    yb: np.ndarray,
    l2: float,
    executor: ThreadPoolExecutor | None = None,
    workers: int = 1,
) -> tuple[float, Gradients]:
    """Objective and gradients of one mini-batch, optionally split across threads.

    Sub-batches are contiguous; their data terms are combined in sub-batch order
    weighted by size, then the L2 term is added once.
    """
    if executor is None or workers == 1 or len(yb) < 2:
        return loss_and_gradients(model, xb, yb, l2)

    chunks = [c for c in np.array_split(np.arange(len(yb)), workers) if len(c)]
    parts = list(executor.map(lambda idx: loss_and_gradients(model, xb[idx], yb[idx], 0.0), chunks))

    loss = 0.0
    grads: Gradients = {}
    for idx, (part_loss, part_grads) in zip(chunks, parts):
        w = len(idx) / len(yb)
        loss += w * part_loss
        for name, g in part_grads.items():
            grads[name] = grads[name] + w * g if name in grads else w * g
    if l2:
        params = model.parameters()
        for name in WEIGHT_NAMES:
            grads[name] = grads[name] + 2.0 * l2 * params[name]
    return loss + l2_penalty(model, l2), grads


def _require_both_classes(dataset: BinaryDataset, what: str) -> None:
    negatives, positives = dataset.class_counts
    if len(dataset) == 0:
        raise DatasetError(f"{what} dataset is empty")
    if negatives == 0 or positives == 0:
        raise DatasetError(f"{what} dataset has a single class ({negatives} negatives, {positives} positives)")


def train(
    dataset: BinaryDataset,
    validation: BinaryDataset,
    config: TrainConfig,
    hierarchy: CoarseningHierarchy,
    architecture: Architecture | None = None,
) -> tuple[GcnnModel, TrainReport]:
    """Train a binary model for ``dataset.bundle`` and return the best-validation model."""
    _require_both_classes(dataset, "training")
    _require_both_classes(validation, "validation")
    for d, what in ((dataset, "training"), (validation, "validation")):
        if d.padded_length != hierarchy.padded_length:
            raise DatasetError(
                f"{what} samples have length {d.padded_length}, hierarchy expects {hierarchy.padded_length}"
            )

    if config.reverse_augment:
        dataset = augment_reversed(dataset, hierarchy)

    model = init_model(hierarchy, config.seed, dataset.normalization, dataset.bundle, architecture)
    state = OptimizerState.zeros_like(model)
    rng = np.random.default_rng([config.seed, 1])
    logger.info(
        f"Training {dataset.bundle!r}: {len(dataset)} training samples, {len(validation)} validation "
        f"samples, batch={config.batch_size}, lr={config.learning_rate}, l2={config.l2}"
    )

    best_model, best_val, best_epoch = model, math.inf, 1
    history: dict[str, list[float]] = {"train_loss": [], "val_loss": [], "val_accuracy": []}
    stale = 0
    executor = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for epoch in range(1, config.max_epochs + 1):
            order = rng.permutation(len(dataset))
            epoch_loss = 0.0
            for start in range(0, len(order), config.batch_size):
                idx = order[start : start + config.batch_size]
                loss, grads = batch_gradients(
                    model, dataset.samples[idx], dataset.labels[idx], config.l2, executor, config.workers
                )
                if not math.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
                    raise TrainingError(epoch, f"training diverged (loss={loss})")
                model, state = optimizer_step(state, model, grads, config.optimizer)
                epoch_loss += loss * len(idx)

            train_loss = epoch_loss / len(dataset)
            val_loss, val_acc = evaluate_split(model, validation)
            if not math.isfinite(val_loss):
                raise TrainingError(epoch, f"validation loss is {val_loss}")
            history["train_loss"].append(train_loss)
            history["val_loss"].append(val_loss)
            history["val_accuracy"].append(val_acc)
            logger.info(
                f"epoch {epoch}: train_loss={train_loss:.6f} val_loss={val_loss:.6f} val_acc={val_acc:.4f}"
            )

            if val_loss < best_val:
                best_model, best_val, best_epoch = model, val_loss, epoch
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    logger.info(f"Early stop at epoch {epoch}; best epoch {best_epoch}")
                    break
    finally:
        if executor is not None:
            executor.shutdown()

    report = TrainReport(**history, stopping_epoch=len(history["val_loss"]), best_epoch=best_epoch)
    return best_model, report
