"""
Command logging.

Logs the start, wall time and failure of every subcommand.
"""

import functools
import logging
import time
from collections.abc import Callable

logger = logging.getLogger(__name__)


def log_command(name: str) -> Callable:
    """
    Decorator logging one subcommand.

    Usage:
        @log_command("fit")
        def cmd_fit(...): ...
    """

    def decorate(command: Callable) -> Callable:
        @functools.wraps(command)
        def wrapper(*args, **kwargs):
            start_time = time.monotonic()
            logger.info(f"Command {name} started")
            try:
                result = command(*args, **kwargs)
            except Exception as e:
                elapsed = time.monotonic() - start_time
                logger.error(f"Command {name} failed after {elapsed:.2f}s: {type(e).__name__}")
                raise
            elapsed = time.monotonic() - start_time
            logger.info(f"Command {name} finished in {elapsed:.2f}s")
            return result

        return wrapper

    return decorate
