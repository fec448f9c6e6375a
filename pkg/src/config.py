"""
Environment Configuration for pshlab
Reads optional settings from the process environment or a local .env file.
"""

import os
from dotenv import load_dotenv

from src.constants import DEFAULT_SEED
from src.logger import setup_logger

# Load environment variables from .env file (local runs only)
# Variables already set in the shell take precedence
load_dotenv(override=False)

logger = setup_logger(__name__)


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not an integer, using {default}")
        return default
    if value < 1:
        logger.warning(f"Ignoring {name}={value}: must be positive, using {default}")
        return default
    return value


def get_thread_count() -> int:
    """
    Maximum number of worker threads used to evaluate t-schedules.

    Returns:
        Value of PSHLAB_THREADS, or 1 when unset or invalid
    """
    return _positive_int("PSHLAB_THREADS", 1)


def get_default_seed() -> int:
    """
    Seed used by Monte Carlo paths when the CLI gets no --seed.

    Returns:
        Value of PSHLAB_SEED, or DEFAULT_SEED (see constants.py)
    """
    raw = os.getenv("PSHLAB_SEED")
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring PSHLAB_SEED={raw!r}: not an integer")
        return DEFAULT_SEED
