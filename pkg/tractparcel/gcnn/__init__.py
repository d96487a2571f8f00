"""Spectral graph convolutional network: parameters, layers, passes and gradient checks."""

from tractparcel.gcnn.gradcheck import GradCheckReport, finite_difference_check
from tractparcel.gcnn.layers import (
    ShapeMismatchError,
    dense_forward,
    graph_max_pool,
    relu,
    softmax_cross_entropy,
    spectral_conv_backward,
    spectral_conv_forward,
)
from tractparcel.gcnn.network import (
    ForwardTape,
    backward,
    forward,
    l2_penalty,
    loss_and_gradients,
    objective,
    predict_proba,
)
from tractparcel.gcnn.params import (
    PARAMETER_NAMES,
    WEIGHT_NAMES,
    Architecture,
    DenseParams,
    GcnnModel,
    Gradients,
    ModelInitError,
    SpectralConvParams,
    architecture_for,
    init_model,
)

__all__ = [
    "Architecture",
    "SpectralConvParams",
    "DenseParams",
    "GcnnModel",
    "Gradients",
    "ModelInitError",
    "PARAMETER_NAMES",
    "WEIGHT_NAMES",
    "architecture_for",
    "init_model",
    "ShapeMismatchError",
    "spectral_conv_forward",
    "spectral_conv_backward",
    "relu",
    "graph_max_pool",
    "dense_forward",
    "softmax_cross_entropy",
    "ForwardTape",
    "forward",
    "backward",
    "l2_penalty",
    "objective",
    "loss_and_gradients",
    "predict_proba",
    "GradCheckReport",
    "finite_difference_check",
]
