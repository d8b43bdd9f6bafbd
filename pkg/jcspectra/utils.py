"""
Utility functions for jcspectra actions.

Common patterns shared by the actions: consistent error exits, coloured
status lines, logging setup and the CSV number format.
"""

import logging
import sys
from typing import NoReturn

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def handle_error(message: str, exception: Exception, exit_code: int = EXIT_USAGE) -> NoReturn:
    """
    Handle errors consistently across all actions.

    Args:
        message: Error message to display
        exception: The exception that was raised
        exit_code: Exit code to use (default: 2, usage/config error)
    """
    print(f"{message}: {exception}", file=sys.stderr)
    sys.exit(exit_code)


def colorize_text(text: str, color: str, force_color: bool = False) -> str:
    """Apply ANSI color codes to text if output is to a terminal or forced."""
    colors = {
        "green": "\033[92m",
        "red": "\033[91m",
        "blue": "\033[94m",
        "yellow": "\033[93m",
        "reset": "\033[0m",
    }

    if (sys.stdout.isatty() or force_color) and color in colors:
        return f"{colors[color]}{text}{colors['reset']}"
    return text


def status_line(name: str, passed: bool, detail: str = "") -> str:
    mark = colorize_text("PASS", "green") if passed else colorize_text("FAIL", "red")
    return f"{mark} {name}" + (f"  {detail}" if detail else "")


def configure_logging(verbose: bool = False) -> None:
    """Send library log records to stderr; DEBUG with -v, WARNING otherwise."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def format_float(value: float) -> str:
    """Round-trip exact, locale independent."""
    return format(value, ".17g")


def format_cell(value: object) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    return str(value)
