"""Logging configuration for ucover."""

import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

_TEXT_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "INFO", fmt: str = "text", stream: Optional[object] = None) -> None:
    """Install a single stream handler on the ucover logger.

    Args:
        level: Logging level name
        fmt: "text" or "json"
        stream: Output stream (default: stderr, keeping stdout for reports)
    """
    root = logging.getLogger("ucover")
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    if fmt == "json":
        handler.setFormatter(jsonlogger.JsonFormatter(_JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(_TEXT_FORMAT))

    root.addHandler(handler)
    root.setLevel(level.upper())
    root.propagate = False
