"""
Report re-rendering command
"""

from pathlib import Path

import click

from carbon_hedge.cli.deps import translate_errors
from carbon_hedge.services.pipeline import render_reports


@click.command("report")
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@translate_errors
def report_command(run_dir: Path) -> None:
    """Re-render the text tables of a run from its CSV artifacts"""
    for path in render_reports(run_dir):
        click.echo(str(path))
