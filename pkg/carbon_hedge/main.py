"""
Command line entry point
"""

from typing import Optional

import click

from carbon_hedge import __version__
from carbon_hedge.cli.routes import include_commands
from carbon_hedge.core.config import get_settings
from carbon_hedge.core.logging import configure_logging


def create_application() -> click.Group:
    """Create the CLI group with all commands"""
    settings = get_settings()

    @click.group(help=settings.PROJECT_NAME)
    @click.version_option(__version__, prog_name="carbon-hedge")
    @click.option("--log-level", help="Override LOG_LEVEL")
    def application(log_level: Optional[str]) -> None:
        configure_logging(log_level)

    return include_commands(application)


# Create app instance
cli = create_application()


if __name__ == "__main__":
    cli()
