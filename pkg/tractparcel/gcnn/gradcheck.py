"""Central finite-difference verification of the analytic gradients."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from tractparcel.gcnn.network import loss_and_gradients, objective
from tractparcel.gcnn.params import GcnnModel

logger = logging.getLogger(__name__)

# floor of the relative-error denominator
ABS_FLOOR = 1e-8


class GradCheckReport(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    max_relative_error: dict[str, float]
    checked: dict[str, int]
    step: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(err <= self.tolerance for err in self.max_relative_error.values())

    @property
    def worst(self) -> float:
        return max(self.max_relative_error.values(), default=0.0)


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), ABS_FLOOR)


def finite_difference_check(
    model: GcnnModel,
    batch: np.ndarray,
    labels,
    step: float = 1e-5,
    tolerance: float = 1e-4,
    l2: float = 0.0,
    samples_per_group: int = 200,
    seed: int = 0,
) -> GradCheckReport:
    """Compare analytic gradients with ``(L(t+e) - L(t-e)) / (2 * step)``.

    Up to ``samples_per_group`` entries of every parameter group are checked,
    chosen by a generator seeded with ``seed``.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    _, analytic = loss_and_gradients(model, batch, labels, l2)
    rng = np.random.default_rng(seed)
    params = model.parameters()

    errors: dict[str, float] = {}
    checked: dict[str, int] = {}
    for name, value in params.items():
        picks = np.sort(rng.choice(value.size, size=min(samples_per_group, value.size), replace=False))
        worst = 0.0
        for flat_index in picks:
            shifted = []
            for sign in (1.0, -1.0):
                perturbed = value.copy()
                perturbed.flat[flat_index] += sign * step
                shifted.append(objective(model.with_parameters({name: perturbed}), batch, labels, l2))
            numeric = (shifted[0] - shifted[1]) / (2.0 * step)
            worst = max(worst, relative_error(float(analytic[name].flat[flat_index]), numeric))
        errors[name] = worst
        checked[name] = int(len(picks))

    report = GradCheckReport(max_relative_error=errors, checked=checked, step=step, tolerance=tolerance)
    logger.info(f"Gradient check: worst relative error {report.worst:.3e} (passed={report.passed})")
    return report
