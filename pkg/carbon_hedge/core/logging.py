"""
Logging setup
"""

import logging

from carbon_hedge.core.config import get_settings


def configure_logging(level: str | None = None) -> None:
    """Configure root logging once for the process"""
    settings = get_settings()
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
    )
    # matplotlib is chatty at INFO about font caches
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
