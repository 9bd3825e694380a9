"""
Command-line input validation.

Validators return (is_valid, error_message) so that callers decide how to
report a bad value.
"""

from pathlib import Path

MAX_SEED = 2**64 - 1


def validate_seed(value: str) -> tuple[bool, str | None]:
    """
    Validate a --seed value.

    Examples:
        >>> validate_seed("42")
        (True, None)

        >>> validate_seed("-1")
        (False, 'Seed must lie in [0, 18446744073709551615]')
    """
    try:
        seed = int(value)
    except (TypeError, ValueError):
        return False, f"Seed must be an integer, got {value!r}"
    if not 0 <= seed <= MAX_SEED:
        return False, f"Seed must lie in [0, {MAX_SEED}]"
    return True, None


def validate_output_dir(path: str | Path) -> tuple[bool, str | None]:
    """An output directory must not be an existing regular file."""
    p = Path(path)
    if p.exists() and not p.is_dir():
        return False, f"Output path exists and is not a directory: {p}"
    return True, None
