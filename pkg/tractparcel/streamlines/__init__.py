"""Streamline data model, SLT file I/O, resampling, normalization and synthetic data."""

from tractparcel.streamlines.io import (
    StreamlineFormatError,
    parse_streamline_file,
    parse_streamline_text,
    write_streamline_file,
    write_text_atomic,
)
from tractparcel.streamlines.models import (
    BundleSpec,
    NormalizationTransform,
    Streamline,
    StreamlineSet,
    SyntheticSpec,
)
from tractparcel.streamlines.resample import (
    DegenerateStreamlineError,
    NormalizationError,
    apply_normalization,
    fit_normalization,
    invert_normalization,
    resample_uniform,
)
from tractparcel.streamlines.synthetic import (
    SpecFileError,
    generate_synthetic_dataset,
    parse_synthetic_spec,
    read_synthetic_spec,
)

__all__ = [
    "Streamline",
    "StreamlineSet",
    "NormalizationTransform",
    "BundleSpec",
    "SyntheticSpec",
    "StreamlineFormatError",
    "parse_streamline_file",
    "parse_streamline_text",
    "write_streamline_file",
    "write_text_atomic",
    "DegenerateStreamlineError",
    "NormalizationError",
    "resample_uniform",
    "fit_normalization",
    "apply_normalization",
    "invert_normalization",
    "SpecFileError",
    "generate_synthetic_dataset",
    "parse_synthetic_spec",
    "read_synthetic_spec",
]
