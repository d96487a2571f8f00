"""Parameter containers for the spectral GCNN and their initialization."""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tractparcel.graph.coarsening import CoarseningHierarchy
from tractparcel.streamlines.models import NormalizationTransform

logger = logging.getLogger(__name__)

_STRICT_CONFIG = ConfigDict(extra="forbid", frozen=True)
_ARRAY_CONFIG = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

Gradients = dict[str, np.ndarray]

PARAMETER_NAMES = (
    "conv1.coefficients",
    "conv2.coefficients",
    "fc.weight",
    "fc.bias",
    "out.weight",
    "out.bias",
)
# parameters subject to the L2 penalty; biases are excluded
WEIGHT_NAMES = ("conv1.coefficients", "conv2.coefficients", "fc.weight", "out.weight")


# each level keeps a dense eigenbasis
MAX_NODES = 2048
MAX_LEVELS = 8


class ModelInitError(ValueError):
    pass


class Architecture(BaseModel):
    """GC<conv1>-P2-GC<conv2>-P2-FC<fc_units> over a path of ``num_nodes`` points."""

    model_config = _STRICT_CONFIG

    num_nodes: int = Field(default=100, ge=2, le=MAX_NODES)
    num_levels: int = Field(default=3, ge=3, le=MAX_LEVELS)
    in_channels: Literal[3] = 3
    conv1_channels: int = Field(default=32, ge=1)
    conv2_channels: int = Field(default=64, ge=1)
    fc_units: int = Field(default=512, ge=1)
    num_classes: Literal[2] = 2


class SpectralConvParams(BaseModel):
    """Spectral filter diagonals, shaped ``(out_channels, in_channels, level_size)``."""

    model_config = _ARRAY_CONFIG

    level: int = Field(ge=0)
    coefficients: np.ndarray

    @property
    def out_channels(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def in_channels(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def size(self) -> int:
        return int(self.coefficients.shape[2])


class DenseParams(BaseModel):
    model_config = _ARRAY_CONFIG

    weight: np.ndarray
    bias: np.ndarray

    @model_validator(mode="after")
    def _consistent(self) -> "DenseParams":
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise ValueError(f"weight {self.weight.shape} and bias {self.bias.shape} disagree")
        return self


class GcnnModel(BaseModel):
    """A binary (bundle vs. rest) spectral GCNN with everything needed for inference."""

    model_config = _ARRAY_CONFIG

    architecture: Architecture
    hierarchy: CoarseningHierarchy
    conv1: SpectralConvParams
    conv2: SpectralConvParams
    fc: DenseParams
    out: DenseParams
    normalization: NormalizationTransform
    bundle: str

    @model_validator(mode="after")
    def _dimensions_chain(self) -> "GcnnModel":
        a, levels = self.architecture, self.hierarchy.levels
        expected = {
            "conv1.coefficients": (a.conv1_channels, a.in_channels, levels[0].size),
            "conv2.coefficients": (a.conv2_channels, a.conv1_channels, levels[1].size),
            "fc.weight": (a.fc_units, levels[2].size * a.conv2_channels),
            "fc.bias": (a.fc_units,),
            "out.weight": (a.num_classes, a.fc_units),
            "out.bias": (a.num_classes,),
        }
        for name, arr in self.parameters().items():
            if arr.shape != expected[name]:
                raise ValueError(f"{name} has shape {arr.shape}, expected {expected[name]}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
        if self.conv1.level != 0 or self.conv2.level != 1:
            raise ValueError("conv1 must live on level 0 and conv2 on level 1")
        return self

    @property
    def padded_length(self) -> int:
        return self.hierarchy.padded_length

    def parameters(self) -> dict[str, np.ndarray]:
        return {
            "conv1.coefficients": self.conv1.coefficients,
            "conv2.coefficients": self.conv2.coefficients,
            "fc.weight": self.fc.weight,
            "fc.bias": self.fc.bias,
            "out.weight": self.out.weight,
            "out.bias": self.out.bias,
        }

    def with_parameters(self, params: dict[str, np.ndarray]) -> "GcnnModel":
        """New model with the given parameter arrays; missing names keep current values."""
        p = {**self.parameters(), **params}
        return GcnnModel(
            architecture=self.architecture,
            hierarchy=self.hierarchy,
            conv1=SpectralConvParams(level=0, coefficients=p["conv1.coefficients"]),
            conv2=SpectralConvParams(level=1, coefficients=p["conv2.coefficients"]),
            fc=DenseParams(weight=p["fc.weight"], bias=p["fc.bias"]),
            out=DenseParams(weight=p["out.weight"], bias=p["out.bias"]),
            normalization=self.normalization,
            bundle=self.bundle,
        )


def architecture_for(hierarchy: CoarseningHierarchy, **channels) -> Architecture:
    return Architecture(num_nodes=hierarchy.num_nodes, num_levels=hierarchy.num_levels, **channels)


def init_model(
    hierarchy: CoarseningHierarchy,
    seed: int,
    normalization: NormalizationTransform,
    bundle: str,
    architecture: Architecture | None = None,
) -> GcnnModel:
    """He-style initialization scaled by fan-in; biases start at zero.

    Spectral coefficients use std ``sqrt(2 / (p * m))`` for ``p`` input channels on a
    level with ``m`` nodes; dense weights use ``sqrt(2 / fan_in)``.
    """
    if hierarchy.num_levels < 3:
        raise ModelInitError(f"hierarchy needs at least 3 levels, got {hierarchy.num_levels}")
    a = architecture or architecture_for(hierarchy)
    if (a.num_nodes, a.num_levels) != (hierarchy.num_nodes, hierarchy.num_levels):
        raise ModelInitError(
            f"architecture expects n={a.num_nodes}, levels={a.num_levels}; "
            f"hierarchy has n={hierarchy.num_nodes}, levels={hierarchy.num_levels}"
        )

    rng = np.random.default_rng(seed)
    m0, m1, m2 = (level.size for level in hierarchy.levels[:3])

    def spectral(q: int, p: int, m: int) -> np.ndarray:
        return rng.normal(0.0, np.sqrt(2.0 / (p * m)), size=(q, p, m))

    def dense(out: int, fan_in: int) -> DenseParams:
        return DenseParams(
            weight=rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(out, fan_in)), bias=np.zeros(out)
        )

    model = GcnnModel(
        architecture=a,
        hierarchy=hierarchy,
        conv1=SpectralConvParams(level=0, coefficients=spectral(a.conv1_channels, a.in_channels, m0)),
        conv2=SpectralConvParams(level=1, coefficients=spectral(a.conv2_channels, a.conv1_channels, m1)),
        fc=dense(a.fc_units, m2 * a.conv2_channels),
        out=dense(a.num_classes, a.fc_units),
        normalization=normalization,
        bundle=bundle,
    )
    logger.debug(
        f"Initialized model for {bundle!r}: "
        f"{sum(p.size for p in model.parameters().values())} parameters (seed={seed})"
    )
    return model
