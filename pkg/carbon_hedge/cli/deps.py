"""
Shared CLI options, configuration resolution and error translation
"""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

import click
from pydantic import ValidationError

from carbon_hedge.core.config import (
    FactorScale,
    GraphMode,
    PipelineConfig,
    Rebalance,
    load_pipeline_config,
)
from carbon_hedge.core.errors import ConfigError, PipelineError
from carbon_hedge.models.graph import GainTransform

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def _choices(enum: type) -> click.Choice:
    return click.Choice([member.value for member in enum])


def config_options(func: F) -> F:
    """--config plus the flags that override configuration values"""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            help="YAML configuration or manifest.json of a previous run",
        ),
        click.option("--seed", type=click.IntRange(min=0), help="Master seed"),
        click.option(
            "--threads", type=click.IntRange(min=1), help="Worker threads (1 = deterministic)"
        ),
        click.option("--gain", type=_choices(GainTransform), help="TMFG gain transform"),
        click.option("--dim", type=click.IntRange(min=2), help="Embedding dimension"),
        click.option("--factor-scale", type=_choices(FactorScale), help="Factor file units"),
        click.option(
            "--out",
            "output_dir",
            type=click.Path(file_okay=False, path_type=Path),
            help="Output directory",
        ),
        click.option("--rebalance", type=_choices(Rebalance), help="Factor membership schedule"),
        click.option(
            "--graph-mode", type=_choices(GraphMode), help="One graph per factor or joint"
        ),
        click.option(
            "--residualize-factors", is_flag=True, help="Residualize factor nodes on FF5"
        ),
        click.option("--arithmetic", is_flag=True, help="Aggregate simple returns per leg"),
        click.option("--no-annualize", is_flag=True, help="Report per-period ratios"),
        click.option("--no-plots", is_flag=True, help="Skip SVG plots"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_config(
    config_path: Optional[Path] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    gain: Optional[str] = None,
    dim: Optional[int] = None,
    factor_scale: Optional[str] = None,
    output_dir: Optional[Path] = None,
    rebalance: Optional[str] = None,
    graph_mode: Optional[str] = None,
    residualize_factors: bool = False,
    arithmetic: bool = False,
    no_annualize: bool = False,
    no_plots: bool = False,
) -> PipelineConfig:
    """Configuration file values with flag overrides applied (flags win)"""
    return load_pipeline_config(
        config_path,
        **{
            "seed": seed,
            "threads": threads,
            "graph.gain": gain,
            "training.dim": dim,
            "data.factor_scale": factor_scale,
            "output_dir": str(output_dir) if output_dir is not None else None,
            "rebalance": rebalance,
            "graph.mode": graph_mode,
            "graph.residualize_factors": True if residualize_factors else None,
            "portfolios.arithmetic": True if arithmetic else None,
            "metrics.annualize": False if no_annualize else None,
            "plots": False if no_plots else None,
        },
    )


def translate_errors(func: F) -> F:
    """Map pipeline errors to their exit codes"""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except PipelineError as e:
            logger.error(f"❌ {e}")
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(e.exit_code)
        except ValidationError as e:
            logger.error(f"❌ Invalid parameters: {e}")
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(ConfigError.exit_code)

    return wrapper  # type: ignore[return-value]
