"""Tests for the GCM model text format."""

import numpy as np
import pytest

from tractparcel.gcnn.network import forward
from tractparcel.gcnn.params import PARAMETER_NAMES
from tractparcel.streamlines.models import NormalizationTransform
from tractparcel.training import serialization
from tractparcel.training.serialization import (
    ModelFormatError,
    deserialize_model,
    format_model,
    parse_model,
    serialize_model,
)


@pytest.fixture
def model(tiny_model):
    norm = NormalizationTransform(offset=(0.1, -2.5, 3.3), scale=(0.25, 1 / 3, 7.0))
    return tiny_model.model_copy(update={"normalization": norm})


class TestRoundTrip:
    def test_parameters_and_header_preserved(self, model):
        restored = parse_model(format_model(model))
        assert restored.bundle == "cst_left"
        assert restored.architecture == model.architecture
        assert restored.normalization == model.normalization
        for name in PARAMETER_NAMES:
            np.testing.assert_array_equal(restored.parameters()[name], model.parameters()[name])

    def test_logits_preserved(self, model, tiny_batch):
        restored = parse_model(format_model(model))
        a, _ = forward(model, tiny_batch[0])
        b, _ = forward(restored, tiny_batch[0])
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_file_round_trip_is_byte_stable(self, model, tmp_path):
        path = tmp_path / "m.gcm"
        serialize_model(model, path)
        again = tmp_path / "again.gcm"
        serialize_model(deserialize_model(path), again)
        assert path.read_bytes() == again.read_bytes()

    def test_layout(self, model):
        lines = format_model(model).splitlines()
        assert lines[0] == "GCM 1"
        assert lines[1] == "bundle cst_left"
        assert lines[3] == "arch 8 3 2 3 4 2"
        assert "tensor fc.weight 4 6" in lines


class TestParseErrors:
    def test_unsupported_version(self, model):
        text = format_model(model).replace("GCM 1", "GCM 2", 1)
        with pytest.raises(ModelFormatError, match="version"):
            parse_model(text)

    def test_missing_header(self):
        with pytest.raises(ModelFormatError, match="header"):
            parse_model("bundle x\n")

    def test_tampered_dimension(self, model):
        text = format_model(model).replace("tensor fc.weight 4 6", "tensor fc.weight 4 5")
        with pytest.raises(ModelFormatError):
            parse_model(text)

    def test_architecture_disagrees_with_tensors(self, model):
        text = format_model(model).replace("arch 8 3 2 3 4 2", "arch 8 3 5 3 4 2")
        with pytest.raises(ModelFormatError, match="arch line implies"):
            parse_model(text)

    def test_oversized_graph_rejected_before_building(self, monkeypatch):
        def fail(*args):
            raise AssertionError("hierarchy built for an invalid header")

        monkeypatch.setattr(serialization, "build_hierarchy", fail)
        text = "GCM 1\nbundle CST\nnorm 0 0 0 1 1 1\narch 400000000 3 8 16 64 2\n"
        with pytest.raises(ModelFormatError, match="header"):
            parse_model(text)

    def test_too_many_levels_rejected(self, model):
        text = format_model(model).replace("arch 8 3 2 3 4 2", "arch 8 60 2 3 4 2")
        with pytest.raises(ModelFormatError, match="header"):
            parse_model(text)

    def test_tensor_dimensions_checked_before_hierarchy(self, model, monkeypatch):
        def fail(*args):
            raise AssertionError("hierarchy built for mismatched tensors")

        monkeypatch.setattr(serialization, "build_hierarchy", fail)
        text = format_model(model).replace("tensor fc.weight 4 6", "tensor fc.weight 3 8")
        with pytest.raises(ModelFormatError, match="arch line implies"):
            parse_model(text)

    def test_truncated(self, model):
        lines = format_model(model).splitlines()
        with pytest.raises(ModelFormatError, match="truncated"):
            parse_model("\n".join(lines[:-1]) + "\n")

    def test_trailing_content(self, model):
        with pytest.raises(ModelFormatError, match="unexpected content"):
            parse_model(format_model(model) + "0.5 0.5\n")

    def test_non_numeric_value(self, model):
        lines = format_model(model).splitlines()
        lines[-1] = "abc def"
        with pytest.raises(ModelFormatError, match="invalid number"):
            parse_model("\n".join(lines))

    def test_invalid_scale(self, model):
        text = format_model(model).splitlines()
        text[2] = "norm 0 0 0 1 0 1"
        with pytest.raises(ModelFormatError, match="header"):
            parse_model("\n".join(text))
