"""
Command error handling.

Catches every exception a command raises, logs it and turns it into an
exit code plus a machine-readable payload on stdout:

    {"error": "<code>", "message": "...", "detail": "..."}

Exit codes:
    0 - success
    2 - ConfigError / DataError (bad configuration or input)
    3 - any other error
"""

import functools
import json
import logging
from collections.abc import Callable

from turbidvar.core.exceptions import ConfigError, DataError, TurbidVarError
from turbidvar.templates.messages import ERROR_GENERIC

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 2
EXIT_RUNTIME_ERROR = 3

INTERNAL_ERROR_CODE = "InternalError"


def error_payload(error: BaseException) -> dict[str, str]:
    """Payload printed for a failed command."""
    if isinstance(error, TurbidVarError):
        return {
            "error": error.code,
            "message": error.message,
            "detail": error.technical_message,
        }
    return {
        "error": INTERNAL_ERROR_CODE,
        "message": ERROR_GENERIC,
        "detail": f"{type(error).__name__}: {error}",
    }


def exit_code(error: BaseException) -> int:
    if isinstance(error, ConfigError | DataError):
        return EXIT_USER_ERROR
    return EXIT_RUNTIME_ERROR


def _report(error: BaseException) -> int:
    if isinstance(error, ConfigError | DataError):
        logger.warning(f"{type(error).__name__}: {error.technical_message}")
    elif isinstance(error, TurbidVarError):
        logger.error(f"{type(error).__name__}: {error.technical_message}")
    else:
        logger.exception(f"Unexpected error: {type(error).__name__}: {error}")
    print(json.dumps(error_payload(error)), flush=True)
    return exit_code(error)


def handle_errors(command: Callable[..., int | None]) -> Callable[..., int]:
    """
    Wrap a command so that it always returns an exit code.

    Usage:
        @handle_errors
        def cmd_fit(config, settings) -> int: ...
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> int:
        try:
            result = command(*args, **kwargs)
        except Exception as e:
            return _report(e)
        return EXIT_OK if result is None else result

    return wrapper
