"""
Logging Configuration for pshlab
Centralized logging setup for the numerical modules and the CLI.
"""

import logging
import os
import sys
from typing import Optional


def _level_from_env(default: int) -> int:
    """Resolve PSHLAB_LOG_LEVEL (name or number), falling back to default."""
    raw = os.getenv("PSHLAB_LOG_LEVEL")
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.strip().upper())
    return level if isinstance(level, int) else default


def setup_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """
    Set up and configure a logger for a module.

    Args:
        name: Logger name (typically __name__ from the calling module)
        level: Logging level (default: PSHLAB_LOG_LEVEL or INFO)

    Returns:
        Configured logger instance

    Usage:
        from src.logger import setup_logger
        logger = setup_logger(__name__)
        logger.info("Trace finished")
        logger.error("Oracle failed", exc_info=True)

    Note:
        Records go to stderr so that stdout stays clean for JSON reports.
    """
    logger = logging.getLogger(name)

    # Only configure if not already configured (prevents duplicate handlers)
    if not logger.handlers:
        resolved = _level_from_env(logging.INFO) if level is None else level
        logger.setLevel(resolved)

        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(resolved)

        # Format: timestamp - module - level - message
        formatter = logging.Formatter(
            fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        handler.setFormatter(formatter)

        logger.addHandler(handler)

    return logger
