"""
turbidvar entry point.

Configures logging and dispatches one subcommand.

Run with: python -m turbidvar.main fit --config run.json
"""

import logging
import sys

from turbidvar import __version__
from turbidvar.cli import run
from turbidvar.config import get_settings


def setup_logging(level: str) -> None:
    """
    Configure application logging.

    Logs go to stderr so that stdout carries only command output.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR)
    """
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def main(argv: list[str] | None = None) -> int:
    settings = get_settings()
    setup_logging(settings.log_level)
    logger = logging.getLogger(__name__)
    logger.debug(f"turbidvar {__version__}, max_workers={settings.max_workers}")
    return run(argv, settings)


if __name__ == "__main__":
    sys.exit(main())
