"""Command-line interface."""

from turbidvar.cli.commands import build_parser, run
from turbidvar.cli.error_handler import handle_errors

__all__ = ["build_parser", "handle_errors", "run"]
