"""CLI interface for tractparcel."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional

import typer

from tractparcel.config import settings
from tractparcel.logging_setup import configure_logging
from tractparcel.orchestrator import run_evaluate, run_generate, run_predict, run_train
from tractparcel.training.trainer import TrainConfig

logger = logging.getLogger(__name__)

app = typer.Typer(help="Streamline bundle parcellation with spectral graph CNNs.", add_completion=False)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

SEED_HELP = "Seed for all randomness (default 0)"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# typer may ship its own click; catch the classes it actually raises
UsageError = next(c for c in typer.BadParameter.__mro__ if c.__name__ == "UsageError")


def _fraction(value: float | None) -> float | None:
    if value is not None and not 0 < value < 1:
        raise typer.BadParameter(f"must lie strictly between 0 and 1, got {value}")
    return value


def _positive(value: float | None) -> float | None:
    if value is not None and not value > 0:
        raise typer.BadParameter(f"must be positive, got {value}")
    return value


def _log_level(value: str) -> str:
    if value.upper() not in LOG_LEVELS:
        raise typer.BadParameter(f"must be one of {', '.join(LOG_LEVELS)}, got {value!r}")
    return value.upper()


@app.callback()
def _setup(
    log_level: str = typer.Option(
        settings.LOG_LEVEL, "--log-level", callback=_log_level, help="Logging level"
    ),
) -> None:
    configure_logging(log_level, settings.LOG_JSON_PATH)


@app.command()
def generate(
    spec: Path = typer.Option(..., "--spec", help="Synthetic spec file"),
    out: Path = typer.Option(..., "--out", help="Output SLT file"),
    seed: int = typer.Option(0, "--seed", min=0, max=2**64 - 1, help=SEED_HELP),
) -> None:
    """Generate a synthetic labelled streamline file."""
    _display_summary("Generate", run_generate(spec, out, seed=seed))


@app.command("train")
def train_command(
    data: Path = typer.Option(..., "--data", help="Labelled SLT training file"),
    bundle: str = typer.Option(..., "--bundle", help="Bundle to detect"),
    out: Path = typer.Option(..., "--out", help="Output GCM model file"),
    val_fraction: Optional[float] = typer.Option(
        None, "--val-fraction", callback=_fraction, help="Validation share of --data"
    ),
    val_files: Optional[list[Path]] = typer.Option(
        None, "--val-files", help="Whole SLT files used as the validation split (repeatable)"
    ),
    seed: int = typer.Option(0, "--seed", min=0, max=2**64 - 1, help=SEED_HELP),
    epochs: Optional[int] = typer.Option(None, "--epochs", min=1, help="Maximum epochs"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", min=1),
    learning_rate: Optional[float] = typer.Option(None, "--learning-rate", callback=_positive),
    l2: Optional[float] = typer.Option(None, "--l2", min=0.0, help="L2 coefficient on weights"),
    patience: Optional[int] = typer.Option(None, "--patience", min=1),
    workers: Optional[int] = typer.Option(None, "--workers", min=1),
    reverse: Optional[bool] = typer.Option(None, "--reverse/--no-reverse", help="Reversal augmentation"),
    conv1: Optional[int] = typer.Option(None, "--conv1", min=1, help="First convolution channels"),
    conv2: Optional[int] = typer.Option(None, "--conv2", min=1, help="Second convolution channels"),
    fc: Optional[int] = typer.Option(None, "--fc", min=1, help="Fully connected units"),
    neighbor_margin: Optional[float] = typer.Option(None, "--neighbor-margin", min=0.0),
) -> None:
    """Train one binary bundle model."""
    config = TrainConfig.from_settings(
        settings,
        seed=seed,
        max_epochs=epochs,
        batch_size=batch_size,
        learning_rate=learning_rate,
        l2=l2,
        patience=patience,
        workers=workers,
        reverse_augment=reverse,
    )
    metrics = run_train(
        data,
        bundle,
        out,
        config,
        val_fraction=val_fraction,
        val_paths=val_files,
        conv1_channels=conv1,
        conv2_channels=conv2,
        fc_units=fc,
        neighbor_margin=neighbor_margin,
    )
    _display_summary("Train", metrics)


@app.command()
def predict(
    model: Path = typer.Option(..., "--model", help="GCM model file"),
    data: Path = typer.Option(..., "--data", help="SLT file to label"),
    out: Path = typer.Option(..., "--out", help="Output predictions file"),
    threshold: Optional[float] = typer.Option(None, "--threshold", min=0.0, max=1.0),
) -> None:
    """Write ``id probability label`` lines for every streamline."""
    _display_summary("Predict", run_predict(model, data, out, threshold=threshold))


@app.command()
def evaluate(
    models: list[Path] = typer.Option(..., "--models", help="GCM model file (repeatable)"),
    data: list[Path] = typer.Option(..., "--data", help="Labelled SLT file per subject (repeatable)"),
    out: Path = typer.Option(..., "--out", help="Output report file"),
    voxel_size: Optional[float] = typer.Option(None, "--voxel-size", callback=_positive),
    threshold: Optional[float] = typer.Option(None, "--threshold", min=0.0, max=1.0),
) -> None:
    """Score models against labelled subjects and write the evaluation report."""
    metrics = run_evaluate(models, data, out, voxel_size=voxel_size, threshold=threshold)
    _display_summary("Evaluate", metrics)


def _display_summary(title: str, metrics: dict) -> None:
    """Display job summary on stderr."""
    typer.echo(f"\n{title} Summary:", err=True)
    for key, value in metrics.items():
        if key == "duration_sec":
            continue
        if isinstance(value, dict):
            value = ", ".join(f"{k}={v:.4f}" for k, v in value.items())
        elif isinstance(value, float):
            value = f"{value:.4f}"
        typer.echo(f"  {key}: {value}", err=True)
    typer.echo(f"  Duration: {metrics['duration_sec']:.2f}s", err=True)


def run_cli(argv: list[str] | None = None) -> int:
    """Run a subcommand and return its exit code: 0 success, 1 usage error, 2 data/model error."""
    argv = sys.argv[1:] if argv is None else list(argv)
    command = typer.main.get_command(app)
    if not argv:
        with command.make_context("tractparcel", [], resilient_parsing=True) as ctx:
            typer.echo(command.get_help(ctx), err=True)
        return EXIT_USAGE
    try:
        result = command.main(args=argv, prog_name="tractparcel", standalone_mode=False)
    except UsageError as e:
        e.show(file=sys.stderr)
        return EXIT_USAGE
    except typer.Abort:
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        typer.echo(f"Error: {e}", err=True)
        return EXIT_DATA
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
