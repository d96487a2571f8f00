"""Adaptive-moment (Adam) parameter updates over named parameter groups."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from tractparcel.gcnn.params import PARAMETER_NAMES, GcnnModel, Gradients


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)


class OptimizerState(BaseModel):
    """First and second moment estimates per parameter, plus the step counter."""

    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = Field(default=0, ge=0)

    @classmethod
    def zeros_like(cls, model: GcnnModel) -> "OptimizerState":
        params = model.parameters()
        return cls(
            m={name: np.zeros_like(p) for name, p in params.items()},
            v={name: np.zeros_like(p) for name, p in params.items()},
        )


def optimizer_step(
    state: OptimizerState, model: GcnnModel, gradients: Gradients, config: OptimizerConfig
) -> tuple[GcnnModel, OptimizerState]:
    """One bias-corrected Adam update; returns the new model and state."""
    params = model.parameters()
    for name in PARAMETER_NAMES:
        g = gradients.get(name)
        if g is None or g.shape != params[name].shape or state.m[name].shape != params[name].shape:
            raise ValueError(f"gradient/state shape mismatch for {name}")

    t = state.step + 1
    bc1 = 1.0 - config.beta1**t
    bc2 = 1.0 - config.beta2**t

    m, v, updated = {}, {}, {}
    for name in PARAMETER_NAMES:
        g = gradients[name]
        m[name] = config.beta1 * state.m[name] + (1.0 - config.beta1) * g
        v[name] = config.beta2 * state.v[name] + (1.0 - config.beta2) * (g * g)
        m_hat = m[name] / bc1
        v_hat = v[name] / bc2
        updated[name] = params[name] - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)

    return model.with_parameters(updated), OptimizerState(m=m, v=v, step=t)
