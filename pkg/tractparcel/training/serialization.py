"""GCM text format for trained models.

::

    GCM 1
    bundle <name>
    norm <ox> <oy> <oz> <sx> <sy> <sz>
    arch <n> <levels> <conv1> <conv2> <fc> <classes>
    tensor <name> <dims...>
    <values, one row of the last dimension per line>
    ...

Values are written with 17 significant digits. The coarsening hierarchy is not
stored; it is rebuilt from ``n`` and ``levels``.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from tractparcel.gcnn.params import (
    PARAMETER_NAMES,
    Architecture,
    DenseParams,
    GcnnModel,
    SpectralConvParams,
)
from tractparcel.graph.coarsening import build_hierarchy
from tractparcel.graph.path_graph import GraphError
from tractparcel.streamlines.io import format_float, write_text_atomic
from tractparcel.streamlines.models import NormalizationTransform

logger = logging.getLogger(__name__)

GCM_VERSION = "1"


class ModelFormatError(ValueError):
    pass


def format_model(model: GcnnModel) -> str:
    a = model.architecture
    t = model.normalization
    lines = [
        f"GCM {GCM_VERSION}",
        f"bundle {model.bundle}",
        "norm " + " ".join(format_float(v) for v in (*t.offset, *t.scale)),
        f"arch {a.num_nodes} {a.num_levels} {a.conv1_channels} {a.conv2_channels} {a.fc_units} {a.num_classes}",
    ]
    for name, value in model.parameters().items():
        lines.append(f"tensor {name} " + " ".join(str(d) for d in value.shape))
        for row in value.reshape(-1, value.shape[-1]):
            lines.append(" ".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def serialize_model(model: GcnnModel, path: str | Path) -> None:
    write_text_atomic(path, format_model(model))
    logger.info(f"Wrote model for {model.bundle!r} to {path}")


def _expect(lines: list[list[str]], pos: int, keyword: str, count: int | None = None) -> list[str]:
    if pos >= len(lines):
        raise ModelFormatError(f"truncated file: missing '{keyword}' line")
    tokens = lines[pos]
    if not tokens or tokens[0] != keyword:
        raise ModelFormatError(f"expected '{keyword}' line, got {' '.join(tokens)!r}")
    if count is not None and len(tokens) != count + 1:
        raise ModelFormatError(f"'{keyword}' line needs {count} values, got {len(tokens) - 1}")
    return tokens[1:]


def _ints(tokens: list[str], what: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ModelFormatError(f"invalid integer in {what} line: {' '.join(tokens)!r}") from None


def _floats(tokens: list[str], what: str) -> list[float]:
    try:
        values = [float(t) for t in tokens]
    except ValueError:
        raise ModelFormatError(f"invalid number in {what}") from None
    if not all(np.isfinite(values)):
        raise ModelFormatError(f"non-finite value in {what}")
    return values


def parse_model(text: str) -> GcnnModel:
    """Parse GCM content; every inconsistency raises ``ModelFormatError``."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][:1] != ["GCM"] or len(lines[0]) != 2:
        raise ModelFormatError("missing 'GCM <version>' header")
    if lines[0][1] != GCM_VERSION:
        raise ModelFormatError(f"unsupported GCM version {lines[0][1]!r}, expected {GCM_VERSION}")

    bundle = _expect(lines, 1, "bundle", 1)[0]
    norm = _floats(_expect(lines, 2, "norm", 6), "norm line")
    n, levels, c1, c2, fc, classes = _ints(_expect(lines, 3, "arch", 6), "arch")

    try:
        architecture = Architecture(
            num_nodes=n,
            num_levels=levels,
            conv1_channels=c1,
            conv2_channels=c2,
            fc_units=fc,
            num_classes=classes,
        )
        normalization = NormalizationTransform(offset=tuple(norm[:3]), scale=tuple(norm[3:]))
    except ValidationError as e:
        raise ModelFormatError(f"invalid model header: {e}") from e

    # leading dimensions fixed by the arch line; the rest depend on the hierarchy
    leading = {
        "conv1.coefficients": (c1, architecture.in_channels),
        "conv2.coefficients": (c2, c1),
        "fc.weight": (fc,),
        "fc.bias": (fc,),
        "out.weight": (classes, fc),
        "out.bias": (classes,),
    }
    pos = 4
    tensors: dict[str, np.ndarray] = {}
    for name in PARAMETER_NAMES:
        header = _expect(lines, pos, "tensor")
        if not header or header[0] != name:
            raise ModelFormatError(f"expected tensor {name!r}, got {' '.join(header)!r}")
        dims = _ints(header[1:], f"tensor {name}")
        if not dims or any(d < 1 for d in dims):
            raise ModelFormatError(f"tensor {name} has invalid dimensions {dims}")
        expected = leading[name]
        if tuple(dims[: len(expected)]) != expected:
            raise ModelFormatError(
                f"tensor {name} has dimensions {dims}, arch line implies leading {list(expected)}"
            )
        size = math.prod(dims)
        pos += 1
        values: list[str] = []
        while len(values) < size:
            if pos >= len(lines) or lines[pos][0] == "tensor":
                raise ModelFormatError(f"truncated file: tensor {name} has {len(values)} of {size} values")
            values.extend(lines[pos])
            pos += 1
        if len(values) != size:
            raise ModelFormatError(f"tensor {name} has {len(values)} values, dimensions imply {size}")
        tensors[name] = np.asarray(_floats(values, f"tensor {name}")).reshape(dims)
    if pos != len(lines):
        raise ModelFormatError(f"unexpected content after the last tensor: {' '.join(lines[pos])!r}")

    try:
        hierarchy = build_hierarchy(n, levels)
    except GraphError as e:
        raise ModelFormatError(f"invalid model header: {e}") from e

    try:
        return GcnnModel(
            architecture=architecture,
            hierarchy=hierarchy,
            conv1=SpectralConvParams(level=0, coefficients=tensors["conv1.coefficients"]),
            conv2=SpectralConvParams(level=1, coefficients=tensors["conv2.coefficients"]),
            fc=DenseParams(weight=tensors["fc.weight"], bias=tensors["fc.bias"]),
            out=DenseParams(weight=tensors["out.weight"], bias=tensors["out.bias"]),
            normalization=normalization,
            bundle=bundle,
        )
    except ValidationError as e:
        raise ModelFormatError(f"inconsistent model dimensions: {e}") from e


def deserialize_model(path: str | Path) -> GcnnModel:
    model = parse_model(Path(path).read_text(encoding="utf-8"))
    logger.info(f"Loaded model for {model.bundle!r} from {path}")
    return model
