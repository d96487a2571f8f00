"""Tests for the Adam update rule."""

import numpy as np
import pytest

from tractparcel.gcnn.params import PARAMETER_NAMES
from tractparcel.training.optimizer import OptimizerConfig, OptimizerState, optimizer_step


def _gradients(model, seed):
    rng = np.random.default_rng(seed)
    return {
        name: rng.choice([-1.0, 1.0], size=p.shape) * rng.uniform(0.5, 2.0, size=p.shape)
        for name, p in model.parameters().items()
    }


class TestOptimizerStep:
    def test_zero_gradient_leaves_parameters(self, tiny_model):
        zeros = {name: np.zeros_like(p) for name, p in tiny_model.parameters().items()}
        model, state = optimizer_step(OptimizerState.zeros_like(tiny_model), tiny_model, zeros, OptimizerConfig())
        for name in PARAMETER_NAMES:
            np.testing.assert_array_equal(model.parameters()[name], tiny_model.parameters()[name])
        assert state.step == 1

    def test_first_step_moves_by_learning_rate(self, tiny_model):
        config = OptimizerConfig(learning_rate=0.01)
        grads = _gradients(tiny_model, 0)
        model, _ = optimizer_step(OptimizerState.zeros_like(tiny_model), tiny_model, grads, config)
        for name in PARAMETER_NAMES:
            delta = model.parameters()[name] - tiny_model.parameters()[name]
            np.testing.assert_allclose(delta, -0.01 * np.sign(grads[name]), rtol=1e-5)

    def test_moments_accumulate(self, tiny_model):
        config = OptimizerConfig()
        grads = _gradients(tiny_model, 1)
        state = OptimizerState.zeros_like(tiny_model)
        model, state = optimizer_step(state, tiny_model, grads, config)
        _, state = optimizer_step(state, model, grads, config)
        assert state.step == 2
        np.testing.assert_allclose(state.m["fc.bias"], (1 - 0.9**2) * grads["fc.bias"])
        np.testing.assert_allclose(state.v["fc.bias"], (1 - 0.999**2) * grads["fc.bias"] ** 2)

    def test_deterministic(self, tiny_model):
        grads = _gradients(tiny_model, 2)
        state = OptimizerState.zeros_like(tiny_model)
        a, _ = optimizer_step(state, tiny_model, grads, OptimizerConfig())
        b, _ = optimizer_step(state, tiny_model, grads, OptimizerConfig())
        for name in PARAMETER_NAMES:
            np.testing.assert_array_equal(a.parameters()[name], b.parameters()[name])

    def test_shape_mismatch(self, tiny_model):
        grads = _gradients(tiny_model, 3)
        grads["out.bias"] = np.zeros(3)
        with pytest.raises(ValueError, match="out.bias"):
            optimizer_step(OptimizerState.zeros_like(tiny_model), tiny_model, grads, OptimizerConfig())

    def test_missing_gradient(self, tiny_model):
        grads = _gradients(tiny_model, 4)
        del grads["conv2.coefficients"]
        with pytest.raises(ValueError):
            optimizer_step(OptimizerState.zeros_like(tiny_model), tiny_model, grads, OptimizerConfig())
