"""CLI entry point using Typer."""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel

from metastable_lab.config import platform_summary, setup_environment
from metastable_lab.errors import ConfigError, LabError
from metastable_lab.models.experiment import ExperimentConfig, load_config
from metastable_lab.models.results import ResultBundle

app = typer.Typer(
    name="metastable-lab",
    help="Numerical laboratory for metastable interface dynamics.",
    no_args_is_help=True,
)
console = Console()

ConfigOption = typer.Option(None, "--config", "-c", help="Experiment config (JSON).")
PresetOption = typer.Option(None, "--preset", "-p", help="Named preset, used when no --config is given.")
OutOption = typer.Option(None, "--out", "-o", help="Output directory.")
WorkersOption = typer.Option(None, "--workers", "-w", min=1, help="Worker processes for sweeps.")
SeedOption = typer.Option(None, "--seed", min=0, help="Seed for randomized checks.")


@app.callback()
def main() -> None:
    """Numerical laboratory for metastable interface dynamics."""
    setup_environment()


def _validation_error(exc: ValidationError) -> ConfigError:
    first = exc.errors()[0]
    path = ".".join(str(part) for part in first["loc"]) or None
    return ConfigError(first["msg"], path=path)


def resolve_config(
    config: Path | None,
    preset: str | None,
    default_preset: str,
    workers: int | None = None,
    seed: int | None = None,
) -> ExperimentConfig:
    """Config file, else preset; command-line overrides are validated like the file."""
    from metastable_lab.presets import get_preset

    try:
        experiment = load_config(config) if config is not None else get_preset(preset or default_preset)
        updates = {k: v for k, v in (("workers", workers), ("seed", seed)) if v is not None}
        if updates:
            experiment = ExperimentConfig.model_validate({**experiment.model_dump(), **updates})
    except ValidationError as exc:
        raise _validation_error(exc) from None
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path="--config") from None
    return experiment


def _run(
    command: Callable[..., ResultBundle],
    config: Path | None,
    preset: str | None,
    default_preset: str,
    out: Path | None,
    workers: int | None,
    seed: int | None,
    **kwargs,
) -> None:
    try:
        experiment = resolve_config(config, preset, default_preset, workers, seed)
        setup_environment(experiment.workers)
        bundle = command(experiment, output_dir=out, **kwargs)
    except LabError as exc:
        colour = "yellow" if exc.exit_code == 2 else "red"
        console.print(f"[{colour}]Error:[/{colour}] {exc}")
        raise typer.Exit(code=exc.exit_code) from None

    console.print(f"\nOutput: {len(bundle.files)} files, config hash {bundle.provenance.config_hash[:12]}")
    if bundle.passed is False:
        raise typer.Exit(code=1)


@app.command()
def spectrum(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    seed: Optional[int] = SeedOption,
) -> None:
    """Check the spectral-gap hypotheses over the eps sweep."""
    from metastable_lab.pipeline import cmd_spectrum

    _run(cmd_spectrum, config, preset, "allen_cahn", out, workers, seed)


@app.command()
def simulate(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    seed: Optional[int] = SeedOption,
) -> None:
    """Run the full PDE and measure interface exit times."""
    from metastable_lab.pipeline import cmd_simulate

    _run(cmd_simulate, config, preset, "allen_cahn", out, workers, seed)


@app.command()
def reduce(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    seed: Optional[int] = SeedOption,
) -> None:
    """Compare the reduced interface equation with the coupled and full dynamics."""
    from metastable_lab.pipeline import cmd_reduce

    _run(cmd_reduce, config, preset, "allen_cahn", out, workers, seed)


@app.command()
def verify(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    seed: Optional[int] = SeedOption,
) -> None:
    """Run the acceptance suite; exits 1 if any criterion fails."""
    from metastable_lab.pipeline import cmd_verify

    _run(cmd_verify, config, preset, "verify", out, workers, seed)


@app.command("family-dump")
def family_dump(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
) -> None:
    """Write family profiles, xi-derivatives and residuals on the xi-grid."""
    from metastable_lab.pipeline import cmd_family_dump

    _run(cmd_family_dump, config, preset, "allen_cahn", out, None, seed)


@app.command()
def presets() -> None:
    """List the named experiment presets."""
    from metastable_lab.presets import PRESETS

    console.print(Panel("[bold]Presets[/bold]"))
    for name, factory in PRESETS.items():
        console.print(f"  {name}: {(factory.__doc__ or '').strip()}")


@app.command()
def info() -> None:
    """Show platform and environment information."""
    summary = platform_summary()
    console.print(Panel("[bold]Platform Info[/bold]"))
    for key, value in summary.items():
        console.print(f"  {key}: {value}")
