"""Dataset assembly, optimization, training loop and model files."""

from tractparcel.training.dataset import (
    BinaryDataset,
    DatasetError,
    assemble_binary_dataset,
    augment_reversed,
    encode_streamlines,
    split_validation,
)
from tractparcel.training.optimizer import OptimizerConfig, OptimizerState, optimizer_step
from tractparcel.training.serialization import (
    ModelFormatError,
    deserialize_model,
    format_model,
    parse_model,
    serialize_model,
)
from tractparcel.training.trainer import TrainConfig, TrainingError, TrainReport, train

__all__ = [
    "BinaryDataset",
    "DatasetError",
    "assemble_binary_dataset",
    "augment_reversed",
    "encode_streamlines",
    "split_validation",
    "OptimizerConfig",
    "OptimizerState",
    "optimizer_step",
    "TrainConfig",
    "TrainReport",
    "TrainingError",
    "train",
    "ModelFormatError",
    "serialize_model",
    "deserialize_model",
    "format_model",
    "parse_model",
]
