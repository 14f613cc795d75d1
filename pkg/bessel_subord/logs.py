import sys

from loguru import logger


def configure_logging(level: str = "WARNING") -> None:
    """Route all library logging to a single stderr sink."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=level.upper(),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {name}:{function} - {message}",
    )
