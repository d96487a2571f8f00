"""Layer primitives of the spectral GCNN, forward and backward.

Feature batches are ``(B, m, c)`` arrays: B samples, m graph nodes in pooling
order, c channels.
"""

from __future__ import annotations

import numpy as np
from scipy.special import log_softmax, softmax

from tractparcel.gcnn.params import DenseParams, SpectralConvParams
from tractparcel.graph.coarsening import CoarseningHierarchy
from tractparcel.graph.path_graph import SpectralBasis


class ShapeMismatchError(ValueError):
    pass


def _check_batch(x: np.ndarray, nodes: int, channels: int, what: str) -> None:
    if x.ndim != 3 or x.shape[1:] != (nodes, channels):
        raise ShapeMismatchError(f"{what}: expected (B, {nodes}, {channels}), got {x.shape}")


def graph_fourier(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    """``Phi^T x`` for every sample and channel."""
    return basis.eigenvectors.T @ x


def spectral_filter(coefficients: np.ndarray, x_hat: np.ndarray) -> np.ndarray:
    """Scale each frequency: ``y_hat[b, i, k] = sum_p g[k, p, i] * x_hat[b, i, p]``."""
    return np.einsum("kpi,bip->bik", coefficients, x_hat)


def spectral_conv_forward(
    params: SpectralConvParams, basis: SpectralBasis, x: np.ndarray
) -> np.ndarray:
    """Pre-activation spectral convolution ``Phi diag(g) Phi^T`` summed over input channels."""
    _check_batch(x, basis.size, params.in_channels, "spectral convolution input")
    if params.size != basis.size:
        raise ShapeMismatchError(f"filter has {params.size} coefficients, basis has {basis.size} nodes")
    return basis.eigenvectors @ spectral_filter(params.coefficients, graph_fourier(basis, x))


def spectral_conv_backward(
    params: SpectralConvParams, basis: SpectralBasis, x_hat: np.ndarray, dy: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients w.r.t. the input and the filter coefficients (data term only)."""
    phi = basis.eigenvectors
    dy_hat = phi.T @ dy
    d_coefficients = np.einsum("bik,bip->kpi", dy_hat, x_hat)
    dx = phi @ np.einsum("kpi,bik->bip", params.coefficients, dy_hat)
    return dx, d_coefficients


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(pre_activation: np.ndarray, dout: np.ndarray) -> np.ndarray:
    return dout * (pre_activation > 0)


def graph_max_pool(
    h: CoarseningHierarchy, level: int, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Max over sibling positions ``2j, 2j+1`` of ``level``; ties go to ``2j``.

    Returns the pooled batch and, per output entry, the input node it came from.
    """
    if not 0 <= level < h.num_levels - 1:
        raise ShapeMismatchError(f"cannot pool level {level} of a {h.num_levels}-level hierarchy")
    m = h.levels[level].size
    if x.ndim != 3 or x.shape[1] != m:
        raise ShapeMismatchError(f"pool input: expected (B, {m}, c), got {x.shape}")
    B, _, c = x.shape
    pairs = x.reshape(B, m // 2, 2, c)
    choice = np.argmax(pairs, axis=2)
    pooled = np.take_along_axis(pairs, choice[:, :, None, :], axis=2)[:, :, 0, :]
    argmax = 2 * np.arange(m // 2)[None, :, None] + choice
    return pooled, argmax


def graph_max_pool_backward(dout: np.ndarray, argmax: np.ndarray, input_size: int) -> np.ndarray:
    dx = np.zeros((dout.shape[0], input_size, dout.shape[2]))
    np.put_along_axis(dx, argmax, dout, axis=1)
    return dx


def dense_forward(params: DenseParams, x: np.ndarray) -> np.ndarray:
    if x.ndim != 2 or x.shape[1] != params.weight.shape[1]:
        raise ShapeMismatchError(f"dense input: expected (B, {params.weight.shape[1]}), got {x.shape}")
    return x @ params.weight.T + params.bias


def dense_backward(
    params: DenseParams, x: np.ndarray, dout: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns ``(dx, d_weight, d_bias)``."""
    return dout @ params.weight, dout.T @ x, dout.sum(axis=0)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over the batch and the class probabilities.

    The L2 term is added by the caller.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise ShapeMismatchError(f"logits {logits.shape} and labels {labels.shape} disagree")
    log_p = log_softmax(logits, axis=1)
    loss = -float(np.mean(log_p[np.arange(len(labels)), labels]))
    return loss, softmax(logits, axis=1)


def softmax_cross_entropy_backward(probabilities: np.ndarray, labels: np.ndarray) -> np.ndarray:
    grad = probabilities.copy()
    grad[np.arange(len(labels)), labels] -= 1.0
    return grad / len(labels)
