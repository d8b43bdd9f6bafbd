"""Tests for jcspectra.utils and jcspectra.errors modules."""

import logging
import pickle
from io import StringIO
from unittest.mock import patch

import pytest

from jcspectra.errors import ConfigError, ExperimentError, JcSpectraError
from jcspectra.utils import (
    EXIT_USAGE,
    colorize_text,
    configure_logging,
    format_cell,
    format_float,
    handle_error,
    status_line,
)


class TestHandleError:
    """Test error handling utility."""

    def test_handle_error_exits_with_code(self) -> None:
        """Test that handle_error exits with correct code."""
        with pytest.raises(SystemExit) as exc_info:
            handle_error("Test error", ValueError("test"), exit_code=42)
        assert exc_info.value.code == 42

    def test_handle_error_default_exit_code(self) -> None:
        """Test that handle_error defaults to the usage exit code."""
        with pytest.raises(SystemExit) as exc_info:
            handle_error("Test error", RuntimeError("test"))
        assert exc_info.value.code == EXIT_USAGE

    @patch("sys.stderr", new_callable=StringIO)
    def test_handle_error_message(self, mock_stderr: StringIO) -> None:
        """Test that the message and exception go to stderr."""
        with pytest.raises(SystemExit):
            handle_error("Error: cannot load config", ConfigError("[grid] bad"))
        assert mock_stderr.getvalue() == "Error: cannot load config: [grid] bad\n"


class TestColorize:
    """Test coloured output."""

    def test_plain_when_not_a_tty(self) -> None:
        """Test that no escape codes are added off a terminal."""
        with patch("sys.stdout", new_callable=StringIO):
            assert colorize_text("hello", "green") == "hello"

    def test_forced_color(self) -> None:
        """Test forced colour output."""
        assert colorize_text("hello", "red", force_color=True) == "\033[91mhello\033[0m"

    def test_unknown_color(self) -> None:
        """Test that unknown colours leave the text alone."""
        assert colorize_text("hello", "purple", force_color=True) == "hello"

    @patch("sys.stdout", new_callable=StringIO)
    def test_status_line(self, _mock_stdout: StringIO) -> None:
        """Test PASS/FAIL lines with and without detail."""
        assert status_line("residual", True) == "PASS residual"
        assert status_line("trace", False, "slope -0.1") == "FAIL trace  slope -0.1"


class TestFormatting:
    """Test the CSV number format."""

    def test_format_float_round_trips(self) -> None:
        """Test that 17 significant digits reproduce the value."""
        value = 0.1 + 0.2
        assert float(format_float(value)) == value
        assert format_float(2.0) == "2"

    def test_format_cell(self) -> None:
        """Test booleans, None, floats and integers."""
        assert format_cell(True) == "1"
        assert format_cell(False) == "0"
        assert format_cell(None) == ""
        assert format_cell(0.5) == "0.5"
        assert format_cell(128) == "128"


class TestLogging:
    """Test logging setup."""

    def test_verbose_sets_debug(self) -> None:
        """Test -v selects DEBUG and the default is WARNING."""
        configure_logging(verbose=True)
        assert logging.getLogger().level == logging.DEBUG
        configure_logging()
        assert logging.getLogger().level == logging.WARNING


class TestExperimentError:
    """Test the per-point failure wrapper."""

    def test_message_names_point(self) -> None:
        """Test that kind, n and operation appear in the message."""
        err = ExperimentError("residual", 64, "residual_Rn", ValueError("boom"))
        assert str(err) == "residual experiment failed at n=64 in residual_Rn: boom"
        assert isinstance(err, JcSpectraError)

    def test_survives_pickling(self) -> None:
        """Test the error crosses process boundaries intact."""
        err = ExperimentError("trace", 128, "trace_G0", ValueError("boom"))
        restored = pickle.loads(pickle.dumps(err))
        assert str(restored) == str(err)
        assert restored.n == 128
