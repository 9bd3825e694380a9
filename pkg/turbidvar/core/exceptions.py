"""
Custom exceptions for turbidvar.

Exception hierarchy:
    TurbidVarError (base)
    ├── ConfigError - Invalid run configuration or command-line input
    │   └── FileNotFoundConfigError - A configured path does not exist
    ├── DataError - Input data that cannot become a valid Dataset
    │   ├── ParseError, EmptyFileError, NoDateOverlapError,
    │   ├── UnclassifiedSiteError, MissingCovariateError,
    │   └── DatasetMismatchError, LengthMismatchError, InvalidDatasetError
    ├── NumericalError - A kernel was called outside its domain
    │   ├── NotPositiveDefiniteError, InvalidDegreesOfFreedomError
    │   └── OutOfSupportError, TimeIndexOutOfRangeError
    ├── SamplerError
    │   └── AllInitializationsFailedError
    ├── DiagnosticError
    │   └── ZeroVarianceError, InsufficientDrawsError
    └── SimulationError
        └── ConstraintViolationError

Each exception carries a short message suitable for the console and an
optional technical message for logs. ``code`` is the machine-readable
name written into CLI error payloads.
"""

from enum import Enum


class TurbidVarError(Exception):
    """
    Base exception for all turbidvar errors.

    Attributes:
        message: Short human-readable message
        technical_message: Detailed message for logs (optional)
    """

    code = "TurbidVarError"

    def __init__(
        self,
        message: str = "Something went wrong.",
        technical_message: str | None = None,
    ):
        self.message = message
        self.technical_message = technical_message or message
        super().__init__(self.technical_message)

    def __str__(self) -> str:
        return self.technical_message


# =============================================================================
# Configuration
# =============================================================================


class ConfigError(TurbidVarError):
    """
    Raised when the run configuration or command-line input is invalid.

    Examples:
        - n_warmup >= n_iter
        - Unknown model variant
        - Malformed JSON
    """

    code = "ConfigError"

    def __init__(
        self,
        message: str = "Invalid configuration.",
        technical_message: str | None = None,
    ):
        super().__init__(message, technical_message)


class FileNotFoundConfigError(ConfigError):
    """Raised when a path named in the configuration does not exist."""

    code = "FileNotFound"

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"File not found: {path}", f"No such file: {path}")


# =============================================================================
# Data
# =============================================================================


class DataError(TurbidVarError):
    """Raised when input data cannot be turned into a valid Dataset."""

    code = "DataError"

    def __init__(
        self,
        message: str = "Invalid input data.",
        technical_message: str | None = None,
    ):
        super().__init__(message, technical_message)


class ParseReason(str, Enum):
    """Why a raw CSV row was rejected."""

    NON_NUMERIC = "NonNumeric"
    NEGATIVE_VALUE = "NegativeValue"
    DUPLICATE = "Duplicate"
    BAD_TIMESTAMP = "BadTimestamp"
    MISSING_FIELD = "MissingField"
    UNKNOWN_OPERATION = "UnknownOperation"


class ParseError(DataError):
    """
    Raised for a malformed row in an input CSV.

    Attributes:
        row: 1-based line number in the file (header is line 1)
        reason: ParseReason explaining the rejection
    """

    code = "ParseError"

    def __init__(self, row: int, reason: ParseReason, detail: str = ""):
        self.row = row
        self.reason = reason
        technical = f"line {row}: {reason.value}"
        if detail:
            technical = f"{technical} ({detail})"
        super().__init__(f"Could not parse line {row}: {reason.value}", technical)


class EmptyFileError(DataError):
    """Raised when an input CSV has a header but no rows."""

    code = "EmptyFile"


class NoDateOverlapError(DataError):
    """Raised when turbidity and wind series share no dates."""

    code = "NoDateOverlap"


class UnclassifiedSiteError(DataError):
    """Raised when a site has no DredgingSite/DumpSite label."""

    code = "UnclassifiedSite"


class MissingCovariateError(DataError):
    """Raised when a covariate value is missing on a modelled date."""

    code = "MissingCovariate"


class DatasetMismatchError(DataError):
    """Raised when runs being compared were fitted to different data."""

    code = "DatasetMismatch"


class LengthMismatchError(DataError):
    """Raised when a vector does not have the length its layout requires."""

    code = "LengthMismatch"


class InvalidDatasetError(DataError):
    """Raised when a Dataset violates its invariants."""

    code = "InvalidDataset"


# =============================================================================
# Numerics
# =============================================================================


class NumericalError(TurbidVarError):
    """Raised when a numerical kernel is called outside its domain."""

    code = "NumericalError"


class InvalidArgumentError(NumericalError):
    """Raised when a kernel gets malformed shapes or distribution parameters."""

    code = "InvalidArgument"


class NotPositiveDefiniteError(NumericalError):
    """Raised when a Cholesky factorization meets a non-positive pivot."""

    code = "NotPositiveDefinite"


class InvalidDegreesOfFreedomError(NumericalError):
    """Raised when inverse-Wishart degrees of freedom are <= dim - 1."""

    code = "InvalidDegreesOfFreedom"


class OutOfSupportError(NumericalError):
    """Raised when a value lies outside a distribution's support."""

    code = "OutOfSupport"


class TimeIndexOutOfRangeError(NumericalError):
    """Raised when a time index has too few lags or exceeds the series."""

    code = "TimeIndexOutOfRange"


# =============================================================================
# Sampling and diagnostics
# =============================================================================


class SamplerError(TurbidVarError):
    """Raised when posterior sampling cannot proceed."""

    code = "SamplerError"


class AllInitializationsFailedError(SamplerError):
    """Raised when no finite-density start point is found."""

    code = "AllInitializationsFailed"


class DiagnosticError(TurbidVarError):
    """Raised when a diagnostic is undefined for the given draws."""

    code = "DiagnosticError"


class ZeroVarianceError(DiagnosticError):
    """Raised when R-hat is undefined because all draws are identical."""

    code = "ZeroVariance"


class InsufficientDrawsError(DiagnosticError):
    """Raised when an information criterion gets fewer than two draws."""

    code = "InsufficientDraws"


class SimulationError(TurbidVarError):
    """Raised when a simulation request is invalid."""

    code = "SimulationError"


class ConstraintViolationError(SimulationError):
    """Raised when parameters violate their constraints."""

    code = "ConstraintViolation"
