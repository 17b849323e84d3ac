"""Terminal colors for log records (stderr) and command summaries (stdout).

NO_COLOR wins over FORCE_COLOR; otherwise colors follow TTY detection of the
stream being written.
"""

import os
import sys
from typing import TextIO

__all__ = [
    "BOLD",
    "DIM",
    "GREEN",
    "RED",
    "RESET",
    "YELLOW",
    "LogStyles",
    "ReportStyles",
    "colorize",
    "make_style",
    "should_colorize",
    "styled",
]

_CSI = "\x1b["

RESET = f"{_CSI}0m"

BOLD = "1"
DIM = "2"
RED = "31"
GREEN = "32"
YELLOW = "33"


def should_colorize(stream: TextIO | None = None) -> bool:
    """Whether escapes should be written to `stream` (standard error by default)."""
    if os.environ.get("NO_COLOR"):
        return False
    if os.environ.get("FORCE_COLOR"):
        return True
    target = sys.stderr if stream is None else stream
    isatty = getattr(target, "isatty", None)
    return bool(isatty and isatty())


def _sgr(codes: tuple[str, ...]) -> str:
    return f"{_CSI}{';'.join(codes)}m"


def colorize(text: str, *codes: str) -> str:
    """Wrap `text` in the SGR `codes`; no codes leaves it untouched."""
    return f"{_sgr(codes)}{text}{RESET}" if codes else text


def make_style(*codes: str) -> tuple[str, str]:
    """(prefix, suffix) pair for log formatters."""
    return (_sgr(codes) if codes else "", RESET)


def styled(text: str, styles: tuple[str, ...], stream: TextIO | None = None) -> str:
    """Colorize `text` for `stream` (standard output by default) when it accepts colors."""
    return colorize(text, *styles) if should_colorize(sys.stdout if stream is None else stream) else text


class LogStyles:
    """Log level styles."""

    WARNING = (YELLOW, DIM)
    ERROR = (RED, DIM)
    CRITICAL = (RED, BOLD)


class ReportStyles:
    """Command summary styles."""

    HEADER = (BOLD,)
    GOOD = (GREEN, BOLD)
