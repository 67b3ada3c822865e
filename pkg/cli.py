"""
Chains CLI
==========
Run entanglement experiments on inhomogeneous XY chains.

Usage:
  python cli.py presets
  python cli.py validate --preset gaussian-decay
  python cli.py run --preset gaussian-decay --out runs/gauss
  python cli.py run --config my_run.json --precision 256 --seed 7
  python cli.py oracle-compare --seed 3
  python cli.py rg --preset custom
"""

import json
import sys
from pathlib import Path

import click

from src.config import get_logger, setup_logging
from src.errors import ChainsError, InvalidConfig
from src.experiments.runner import run_decimation, run_experiment
from src.experiments.settings import ExperimentConfig, load_presets, validate_config

log = get_logger("CLI")

U64 = click.IntRange(0, 2**64 - 1)


def _load(config_path: Path | None, preset: str | None, default_preset: str | None,
          out: Path | None, precision: int | None, seed: int | None) -> ExperimentConfig:
    if config_path and preset:
        raise click.UsageError("give either --config or --preset, not both")
    if config_path:
        try:
            document = config_path.read_text(encoding="utf-8")
        except OSError as e:
            raise InvalidConfig(f"cannot read {config_path}: {e}")
    else:
        name = preset or default_preset
        if name is None:
            raise click.UsageError("give --config PATH or --preset NAME")
        document = {"experiment": name}

    overrides = {"precision_bits": precision, "seed": seed, "output_dir": out}
    return validate_config(document, overrides)


def _config_options(func):
    func = click.option("--seed", type=U64, default=None, help="Override the config seed.")(func)
    func = click.option("--precision", type=click.IntRange(min=53), default=None,
                        help="Mantissa bits (53 = machine double).")(func)
    func = click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None,
                        help="Output directory.")(func)
    func = click.option("--preset", type=str, default=None, help="Start from a named preset.")(func)
    func = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                        default=None, help="JSON config document.")(func)
    return func


def _guarded(action):
    """Run ``action`` and turn package errors into their exit codes."""
    try:
        return action()
    except ChainsError as e:
        log.debug("run aborted", exc_info=True)
        click.echo(f"error ({type(e).__name__}): {e}", err=True)
        sys.exit(e.exit_code)


def _report(manifest, out_dir: Path):
    click.echo(f"status: {manifest.status}")
    click.echo(f"output: {out_dir}")
    for name, digest in sorted(manifest.files.items()):
        click.echo(f"  {name}  sha256:{digest[:16]}")
    for warning in manifest.warnings:
        click.echo(f"  warning: {warning}")


@click.group()
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING ...")
def main(log_level: str | None):
    """Entanglement of concentric and random XY spin chains."""
    setup_logging(log_level)


@main.command()
@_config_options
def run(config_path, preset, out, precision, seed):
    """Run the experiment a config or preset describes."""
    def action():
        config = _load(config_path, preset, None, out, precision, seed)
        _report(run_experiment(config), config.output_dir)
    _guarded(action)


@main.command()
@_config_options
def validate(config_path, preset, out, precision, seed):
    """Parse and default a config; print the resolved document."""
    def action():
        config = _load(config_path, preset, None, out, precision, seed)
        click.echo(json.dumps(config.to_document(), indent=2))
    _guarded(action)


@main.command("oracle-compare")
@_config_options
def oracle_compare(config_path, preset, out, precision, seed):
    """Compare free-fermion results with dense diagonalization."""
    def action():
        config = _load(config_path, preset, "oracle-compare", out, precision, seed)
        if config.experiment.value != "oracle-compare":
            raise InvalidConfig(f"expected an oracle-compare config, got {config.experiment.value}",
                                field="experiment")
        _report(run_experiment(config), config.output_dir)
    _guarded(action)


@main.command()
@_config_options
def rg(config_path, preset, out, precision, seed):
    """Decimate the config's chain and write its singlet pairing."""
    def action():
        config = _load(config_path, preset, "custom", out, precision, seed)
        _report(run_decimation(config), config.output_dir)
    _guarded(action)


@main.command()
def presets():
    """List the built-in presets."""
    for name, preset in load_presets().items():
        click.echo(f"{name:20s} {preset.get('description', '')}")


if __name__ == "__main__":
    main()
