"""
Pipeline commands: full-window run and expanding-window study
"""

from pathlib import Path
from typing import Any

import click

from carbon_hedge.cli.deps import config_options, resolve_config, translate_errors
from carbon_hedge.services.pipeline import run_expanding_windows, run_pipeline


@click.command("run")
@config_options
@translate_errors
def run_command(**options: Any) -> None:
    """Run the full pipeline on the configured window"""
    config = resolve_config(**options)
    result = run_pipeline(config)
    for name, factor_run in result.factors.items():
        nearest = factor_run.nearest_sector
        click.echo(f"{name}: nearest sector {nearest.value if nearest else 'n/a'}")
    click.echo(f"Artifacts written to {Path(config.output_dir)}")


@click.command("windows")
@config_options
@translate_errors
def windows_command(**options: Any) -> None:
    """Re-run the pipeline on expanding yearly windows"""
    config = resolve_config(**options)
    results = run_expanding_windows(config)
    for result in results:
        for name, factor_run in result.factors.items():
            nearest = factor_run.nearest_sector
            label = nearest.value if nearest else "n/a"
            click.echo(f"{result.window.label} {name}: {label}")
    click.echo(f"Artifacts written to {Path(config.output_dir)}")
