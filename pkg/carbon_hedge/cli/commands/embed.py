"""
Graph embedding command
"""

from pathlib import Path
from typing import Any, Optional

import click

from carbon_hedge.cli.deps import resolve_config, translate_errors
from carbon_hedge.services.pipeline import embed_edge_list


@click.command("embed")
@click.option(
    "--edges",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Edge list with columns src, dst, weight",
)
@click.option(
    "--nodes",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Node file with columns node, kind, sector",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="YAML configuration for walk and training settings",
)
@click.option("--seed", type=click.IntRange(min=0))
@click.option("--threads", type=click.IntRange(min=1))
@click.option("--dim", type=click.IntRange(min=2))
@click.option("--out", "output_dir", required=True, type=click.Path(path_type=Path))
@click.option("--no-plots", is_flag=True)
@translate_errors
def embed_command(
    edges: Path, nodes: Optional[Path], output_dir: Path, **options: Any
) -> None:
    """Embed a weighted graph with node2vec"""
    config = resolve_config(output_dir=output_dir, **options)
    space = embed_edge_list(edges, config, output_dir, nodes=nodes)
    click.echo(f"Embedded {len(space.labels)} nodes in {space.dimension} dimensions")
