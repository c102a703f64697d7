"""
Synthetic market generation command
"""

from pathlib import Path
from typing import Optional

import click

from carbon_hedge.cli.deps import translate_errors
from carbon_hedge.core.config import get_settings
from carbon_hedge.models.synthetic import SyntheticMarketSpec
from carbon_hedge.services.pipeline import write_synthetic_inputs


@click.command("synth")
@click.option("--out", "output_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--n-stocks", type=int, default=200, show_default=True)
@click.option("--n-sectors", type=int, default=8, show_default=True)
@click.option("--rho-intra", type=float, default=0.4, show_default=True)
@click.option("--rho-inter", type=float, default=0.05, show_default=True)
@click.option("--planted-sector", type=int, help="GICS table index of the planted sector")
@click.option("--loading", type=float, default=0.5, show_default=True, help="CO2 loading")
@click.option("--days", type=int, default=1500, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@translate_errors
def synth_command(
    output_dir: Optional[Path],
    n_stocks: int,
    n_sectors: int,
    rho_intra: float,
    rho_inter: float,
    planted_sector: Optional[int],
    loading: float,
    days: int,
    seed: int,
) -> None:
    """Write a synthetic market with a planted high-emission sector"""
    fields = {
        "n_stocks": n_stocks,
        "n_sectors": n_sectors,
        "rho_intra": rho_intra,
        "rho_inter": rho_inter,
        "planted_loading": loading,
        "n_days": days,
        "seed": seed,
    }
    if planted_sector is not None:
        fields["planted_sector"] = planted_sector
    spec = SyntheticMarketSpec(**fields)
    target = output_dir or Path(get_settings().DEFAULT_OUTPUT_DIR) / "synthetic"
    paths = write_synthetic_inputs(spec, target)
    click.echo(f"Synthetic market ({spec.planted.value} planted) written to {target}")
    click.echo(f"Run it with: carbon-hedge run --config {paths['config']}")
