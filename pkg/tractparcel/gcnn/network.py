"""Full forward and backward passes of the GC-P2-GC-P2-FC network."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict

from tractparcel.gcnn.layers import (
    ShapeMismatchError,
    dense_backward,
    dense_forward,
    graph_fourier,
    graph_max_pool,
    graph_max_pool_backward,
    relu,
    relu_backward,
    softmax_cross_entropy,
    softmax_cross_entropy_backward,
    spectral_conv_backward,
    spectral_filter,
)
from tractparcel.gcnn.params import WEIGHT_NAMES, GcnnModel, Gradients

_ARRAY_CONFIG = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)


class ForwardTape(BaseModel):
    """Intermediates of one forward pass, kept for backpropagation."""

    model_config = _ARRAY_CONFIG

    conv1_hat: np.ndarray  # Phi^T of the network input
    conv1_pre: np.ndarray
    pool1_argmax: np.ndarray
    conv2_hat: np.ndarray
    conv2_pre: np.ndarray
    pool2_argmax: np.ndarray
    flat: np.ndarray
    fc_pre: np.ndarray
    hidden: np.ndarray
    logits: np.ndarray

    @property
    def batch_size(self) -> int:
        return int(self.logits.shape[0])


def forward(model: GcnnModel, batch: np.ndarray) -> tuple[np.ndarray, ForwardTape]:
    """Logits for a batch of permuted, padded ``(B, k, 3)`` coordinate matrices.

    conv1 -> ReLU -> pool -> conv2 -> ReLU -> pool -> flatten (node-major) ->
    FC -> ReLU -> output.
    """
    batch = np.asarray(batch, dtype=np.float64)
    a = model.architecture
    if batch.ndim != 3 or batch.shape[1:] != (model.padded_length, a.in_channels):
        raise ShapeMismatchError(
            f"batch must be (B, {model.padded_length}, {a.in_channels}), got {batch.shape}"
        )
    h = model.hierarchy
    basis0, basis1 = h.levels[0].basis, h.levels[1].basis

    conv1_hat = graph_fourier(basis0, batch)
    conv1_pre = basis0.eigenvectors @ spectral_filter(model.conv1.coefficients, conv1_hat)
    pooled1, pool1_argmax = graph_max_pool(h, 0, relu(conv1_pre))

    conv2_hat = graph_fourier(basis1, pooled1)
    conv2_pre = basis1.eigenvectors @ spectral_filter(model.conv2.coefficients, conv2_hat)
    pooled2, pool2_argmax = graph_max_pool(h, 1, relu(conv2_pre))

    B, m2, c2 = pooled2.shape
    flat = pooled2.reshape(B, m2 * c2)
    fc_pre = dense_forward(model.fc, flat)
    hidden = relu(fc_pre)
    logits = dense_forward(model.out, hidden)

    tape = ForwardTape(
        conv1_hat=conv1_hat,
        conv1_pre=conv1_pre,
        pool1_argmax=pool1_argmax,
        conv2_hat=conv2_hat,
        conv2_pre=conv2_pre,
        pool2_argmax=pool2_argmax,
        flat=flat,
        fc_pre=fc_pre,
        hidden=hidden,
        logits=logits,
    )
    return logits, tape


def l2_penalty(model: GcnnModel, l2: float) -> float:
    """``l2`` times the sum of squared weights (biases excluded)."""
    params = model.parameters()
    return l2 * float(sum(np.sum(params[name] ** 2) for name in WEIGHT_NAMES))


def _check_tape(model: GcnnModel, tape: ForwardTape, labels: np.ndarray) -> None:
    a = model.architecture
    if (
        tape.conv1_pre.shape[1:] != (model.padded_length, a.conv1_channels)
        or tape.conv2_pre.shape[2] != a.conv2_channels
        or tape.fc_pre.shape[1] != a.fc_units
    ):
        raise ShapeMismatchError("tape was not produced by this model")
    if labels.shape != (tape.batch_size,):
        raise ShapeMismatchError(f"{labels.shape[0]} labels for a batch of {tape.batch_size}")


def backward(model: GcnnModel, tape: ForwardTape, labels, l2: float = 0.0) -> Gradients:
    """Exact gradients of mean cross-entropy + ``l2 * sum(weights**2)``."""
    labels = np.asarray(labels, dtype=np.int64)
    _check_tape(model, tape, labels)
    h = model.hierarchy

    _, probabilities = softmax_cross_entropy(tape.logits, labels)
    d_logits = softmax_cross_entropy_backward(probabilities, labels)

    d_hidden, d_out_w, d_out_b = dense_backward(model.out, tape.hidden, d_logits)
    d_fc_pre = relu_backward(tape.fc_pre, d_hidden)
    d_flat, d_fc_w, d_fc_b = dense_backward(model.fc, tape.flat, d_fc_pre)

    m1 = h.levels[1].size
    d_pooled2 = d_flat.reshape(tape.batch_size, h.levels[2].size, -1)
    d_conv2_pre = relu_backward(tape.conv2_pre, graph_max_pool_backward(d_pooled2, tape.pool2_argmax, m1))
    d_pooled1, d_conv2 = spectral_conv_backward(model.conv2, h.levels[1].basis, tape.conv2_hat, d_conv2_pre)

    m0 = h.levels[0].size
    d_conv1_pre = relu_backward(tape.conv1_pre, graph_max_pool_backward(d_pooled1, tape.pool1_argmax, m0))
    _, d_conv1 = spectral_conv_backward(model.conv1, h.levels[0].basis, tape.conv1_hat, d_conv1_pre)

    grads = {
        "conv1.coefficients": d_conv1,
        "conv2.coefficients": d_conv2,
        "fc.weight": d_fc_w,
        "fc.bias": d_fc_b,
        "out.weight": d_out_w,
        "out.bias": d_out_b,
    }
    if l2:
        params = model.parameters()
        for name in WEIGHT_NAMES:
            grads[name] = grads[name] + 2.0 * l2 * params[name]
    return grads


def objective(model: GcnnModel, batch: np.ndarray, labels, l2: float = 0.0) -> float:
    logits, _ = forward(model, batch)
    loss, _ = softmax_cross_entropy(logits, labels)
    return loss + l2_penalty(model, l2)


def loss_and_gradients(
    model: GcnnModel, batch: np.ndarray, labels, l2: float = 0.0
) -> tuple[float, Gradients]:
    labels = np.asarray(labels, dtype=np.int64)
    logits, tape = forward(model, batch)
    loss, _ = softmax_cross_entropy(logits, labels)
    return loss + l2_penalty(model, l2), backward(model, tape, labels, l2)


def predict_proba(model: GcnnModel, batch: np.ndarray) -> np.ndarray:
    """Probability of the bundle class (class 1) per sample."""
    logits, _ = forward(model, batch)
    if logits.shape[0] == 0:
        return np.zeros(0)
    _, probabilities = softmax_cross_entropy(logits, np.zeros(logits.shape[0], dtype=np.int64))
    return probabilities[:, 1]
