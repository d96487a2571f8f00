"""End-to-end tests of the command-line surface."""

import pytest

from tractparcel.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, run_cli
from tractparcel.config import settings
from tractparcel.evaluation.report import parse_report
from tractparcel.streamlines.io import parse_streamline_file

SPEC_TEXT = """SPEC 1
noise 0.05
points 20
bundle cst_left arc -10 0 0 8 40
bundle cst_right arc 10 0 0 8 40
"""

TRAIN_FLAGS = [
    "--val-fraction", "0.25",
    "--epochs", "3",
    "--batch-size", "16",
    "--conv1", "2",
    "--conv2", "4",
    "--fc", "8",
]  # fmt: skip


@pytest.fixture(autouse=True)
def _isolated_logging(restore_root_logger):
    yield


@pytest.fixture
def small_graph(monkeypatch):
    monkeypatch.setattr(settings, "RESAMPLE_POINTS", 16)


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "bundles.spec"
    path.write_text(SPEC_TEXT)
    return path


class TestUsage:
    def test_no_arguments(self):
        assert run_cli([]) == EXIT_USAGE

    def test_unknown_command(self):
        assert run_cli(["frobnicate"]) == EXIT_USAGE

    def test_missing_required_option(self, tmp_path):
        assert run_cli(["predict", "--data", str(tmp_path / "x.slt")]) == EXIT_USAGE

    def test_bad_validation_fraction(self, tmp_path):
        args = ["train", "--data", "a.slt", "--bundle", "x", "--out", "m.gcm", "--val-fraction", "1.5"]
        assert run_cli(args) == EXIT_USAGE

    def test_bad_voxel_size(self):
        args = ["evaluate", "--models", "m.gcm", "--data", "a.slt", "--out", "r.txt", "--voxel-size", "0"]
        assert run_cli(args) == EXIT_USAGE

    def test_unknown_log_level(self):
        assert run_cli(["--log-level", "LOUD", "generate", "--help"]) == EXIT_USAGE

    def test_log_level_is_case_insensitive(self, capsys):
        assert run_cli(["--log-level", "debug", "generate", "--help"]) == EXIT_OK
        assert "--spec" in capsys.readouterr().out


class TestDataErrors:
    def test_missing_model_file(self, tmp_path):
        args = ["predict", "--model", str(tmp_path / "nope.gcm"), "--data", "a.slt", "--out", "p.txt"]
        assert run_cli(args) == EXIT_DATA

    def test_malformed_spec(self, tmp_path):
        spec = tmp_path / "bad.spec"
        spec.write_text("SPEC 9\n")
        assert run_cli(["generate", "--spec", str(spec), "--out", str(tmp_path / "o.slt")]) == EXIT_DATA

    def test_absent_bundle(self, tmp_path, spec_file, small_graph):
        data = tmp_path / "train.slt"
        assert run_cli(["generate", "--spec", str(spec_file), "--out", str(data)]) == EXIT_OK
        args = ["train", "--data", str(data), "--bundle", "cc", "--out", str(tmp_path / "m.gcm"), *TRAIN_FLAGS]
        assert run_cli(args) == EXIT_DATA


class TestPipeline:
    def _run(self, root, spec_file):
        train_data, test_data = root / "train.slt", root / "subject01.slt"
        model, preds, report = root / "left.gcm", root / "preds.txt", root / "report.txt"
        assert run_cli(["generate", "--spec", str(spec_file), "--out", str(train_data), "--seed", "1"]) == EXIT_OK
        assert run_cli(["generate", "--spec", str(spec_file), "--out", str(test_data), "--seed", "2"]) == EXIT_OK
        train_args = ["train", "--data", str(train_data), "--bundle", "cst_left", "--out", str(model), *TRAIN_FLAGS]
        assert run_cli(train_args) == EXIT_OK
        assert run_cli(["predict", "--model", str(model), "--data", str(test_data), "--out", str(preds)]) == EXIT_OK
        eval_args = ["evaluate", "--models", str(model), "--data", str(test_data), "--out", str(report)]
        assert run_cli(eval_args) == EXIT_OK
        return train_data, model, preds, report

    def test_generate_train_predict_evaluate(self, tmp_path, spec_file, small_graph):
        train_data, model, preds, report = self._run(tmp_path, spec_file)
        assert len(parse_streamline_file(train_data)) == 80
        assert model.read_text().startswith("GCM 1\nbundle cst_left\n")
        assert len(preds.read_text().splitlines()) == 80
        parsed = parse_report(report.read_text())
        assert parsed.bundles == ["cst_left"]
        assert [r.subject for r in parsed.results] == ["subject01"]
        assert parsed.results[0].counts.total == 80

    def test_outputs_are_reproducible(self, tmp_path, spec_file, small_graph):
        runs = []
        for name in ("a", "b"):
            (tmp_path / name).mkdir()
            runs.append(self._run(tmp_path / name, spec_file))
        for x, y in zip(*runs):
            assert x.read_bytes() == y.read_bytes()

    def test_validation_files(self, tmp_path, spec_file, small_graph):
        train_data, held_out = tmp_path / "train.slt", tmp_path / "val.slt"
        assert run_cli(["generate", "--spec", str(spec_file), "--out", str(train_data), "--seed", "1"]) == EXIT_OK
        assert run_cli(["generate", "--spec", str(spec_file), "--out", str(held_out), "--seed", "3"]) == EXIT_OK
        args = [
            "train", "--data", str(train_data), "--bundle", "cst_right", "--out", str(tmp_path / "r.gcm"),
            "--val-files", str(held_out), "--epochs", "2", "--conv1", "2", "--conv2", "4", "--fc", "8",
        ]  # fmt: skip
        assert run_cli(args) == EXIT_OK
        assert (tmp_path / "r.gcm").read_text().startswith("GCM 1\nbundle cst_right\n")
