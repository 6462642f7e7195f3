"""
logging_common.py
Shared logging setup for the splitkit command line.
"""
import logging
import sys
from typing import Dict, Optional, TextIO

TIMESTAMP_FORMAT = '%Y-%m-%d %H:%M:%S'
LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

_RESET = "\033[0m"


def get_level_colors(is_tty: bool) -> Dict[str, str]:
    """
    Get ANSI colors per log level.

    Args:
        is_tty: Whether the target stream is an interactive terminal.

    Returns:
        Dict mapping level names to escape sequences (empty when not a TTY).
    """
    if not is_tty:
        return {}
    return {
        "DEBUG": "\033[2m",      # dim
        "INFO": "\033[36m",      # cyan
        "WARNING": "\033[33m",   # yellow
        "ERROR": "\033[31m",     # red
    }


class LevelColorFormatter(logging.Formatter):
    """Timestamped formatter that tints the whole record by level."""

    def __init__(self, colors: Dict[str, str]):
        super().__init__(LOG_FORMAT, datefmt=TIMESTAMP_FORMAT)
        self._colors = colors

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        color = self._colors.get(record.levelname)
        if color:
            return f"{color}{text}{_RESET}"
        return text


def setup_logging(level: str = "WARNING", stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Configure the ``splitkit`` logger with a single stream handler.

    Calling it again replaces the handler, so the CLI can be invoked
    repeatedly in one process (tests do this).

    Args:
        level: Level name, one of LOG_LEVELS.
        stream: Target stream, stderr by default.

    Returns:
        logging.Logger: The configured package logger.
    """
    stream = stream if stream is not None else sys.stderr
    root = logging.getLogger("splitkit")
    for handler in list(root.handlers):
        root.removeHandler(handler)

    is_tty = bool(getattr(stream, "isatty", lambda: False)())
    handler = logging.StreamHandler(stream)
    handler.setFormatter(LevelColorFormatter(get_level_colors(is_tty)))
    root.addHandler(handler)
    root.setLevel(level.upper())
    root.propagate = False
    return root
