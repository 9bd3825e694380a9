"""
Tests for command error handling and logging.

Tests cover:
- Error payloads for package and unexpected errors
- Exit codes by error family
- The handle_errors and log_command decorators
"""

import json
import logging

import pytest

from turbidvar.cli.error_handler import (
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
    EXIT_USER_ERROR,
    INTERNAL_ERROR_CODE,
    error_payload,
    exit_code,
    handle_errors,
)
from turbidvar.cli.logging import log_command
from turbidvar.core.exceptions import (
    AllInitializationsFailedError,
    ConfigError,
    EmptyFileError,
    FileNotFoundConfigError,
    ParseError,
    ParseReason,
    ZeroVarianceError,
)


class TestErrorPayload:
    """Tests for error_payload."""

    def test_package_error(self) -> None:
        payload = error_payload(FileNotFoundConfigError("runs/x.json"))
        assert payload == {
            "error": "FileNotFound",
            "message": "File not found: runs/x.json",
            "detail": "No such file: runs/x.json",
        }

    def test_parse_error_carries_row(self) -> None:
        payload = error_payload(ParseError(7, ParseReason.NON_NUMERIC, "turbidity_ntu"))
        assert payload["error"] == "ParseError"
        assert "7" in payload["detail"]

    def test_unexpected_error(self) -> None:
        payload = error_payload(KeyError("boom"))
        assert payload["error"] == INTERNAL_ERROR_CODE
        assert payload["detail"].startswith("KeyError")


class TestExitCode:
    """Tests for exit_code."""

    @pytest.mark.parametrize(
        "error",
        [ConfigError("bad"), FileNotFoundConfigError("x"), EmptyFileError("empty")],
    )
    def test_user_errors(self, error: Exception) -> None:
        assert exit_code(error) == EXIT_USER_ERROR

    @pytest.mark.parametrize(
        "error",
        [AllInitializationsFailedError("no start"), ZeroVarianceError("flat"), RuntimeError()],
    )
    def test_runtime_errors(self, error: Exception) -> None:
        assert exit_code(error) == EXIT_RUNTIME_ERROR


class TestHandleErrors:
    """Tests for the handle_errors decorator."""

    def test_none_means_success(self) -> None:
        @handle_errors
        def command() -> None:
            return None

        assert command() == EXIT_OK

    def test_passes_exit_code_through(self) -> None:
        @handle_errors
        def command() -> int:
            return 0

        assert command() == 0

    def test_user_error(self, capsys: pytest.CaptureFixture) -> None:
        @handle_errors
        def command() -> int:
            raise ConfigError("No dataset configured.", "data.dataset is not set")

        assert command() == EXIT_USER_ERROR
        payload = json.loads(capsys.readouterr().out)
        assert payload["error"] == "ConfigError"
        assert payload["detail"] == "data.dataset is not set"

    def test_unexpected_error_is_logged(
        self, capsys: pytest.CaptureFixture, caplog: pytest.LogCaptureFixture
    ) -> None:
        @handle_errors
        def command() -> int:
            raise ZeroDivisionError("division by zero")

        with caplog.at_level(logging.ERROR):
            assert command() == EXIT_RUNTIME_ERROR
        assert json.loads(capsys.readouterr().out)["error"] == INTERNAL_ERROR_CODE
        assert "ZeroDivisionError" in caplog.text


class TestLogCommand:
    """Tests for the log_command decorator."""

    def test_logs_start_and_finish(self, caplog: pytest.LogCaptureFixture) -> None:
        @log_command("demo")
        def command() -> int:
            return 0

        with caplog.at_level(logging.INFO):
            assert command() == 0
        assert "Command demo started" in caplog.text
        assert "Command demo finished" in caplog.text

    def test_reraises(self, caplog: pytest.LogCaptureFixture) -> None:
        @log_command("demo")
        def command() -> int:
            raise ConfigError("bad")

        with caplog.at_level(logging.ERROR), pytest.raises(ConfigError):
            command()
        assert "Command demo failed" in caplog.text
