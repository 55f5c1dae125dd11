"""Logging setup shared by the CLI, the harness and the run monitor."""

from __future__ import annotations

import logging
import os
import sys
from collections import deque
from threading import Lock
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"
LOG_LEVEL_ENV = "METASTAB_LOG_LEVEL"


class LogBuffer(logging.Handler):
    """Keeps the last ``max_lines`` formatted records in memory (served at /logs)."""

    def __init__(self, max_lines: int = 500) -> None:
        super().__init__()
        self._lines: deque[dict] = deque(maxlen=max_lines)
        self._lock = Lock()
        self.setFormatter(logging.Formatter(LOG_FORMAT))

    def emit(self, record: logging.LogRecord) -> None:
        try:
            entry = {
                "time": record.created,
                "level": record.levelname,
                "logger": record.name,
                "message": record.getMessage(),
            }
        except Exception:
            self.handleError(record)
            return
        with self._lock:
            self._lines.append(entry)

    def tail(self, n: int = 100) -> list[dict]:
        with self._lock:
            lines = list(self._lines)
        return lines[-n:] if n > 0 else []

    def clear(self) -> None:
        with self._lock:
            self._lines.clear()


_buffer: Optional[LogBuffer] = None


def get_log_buffer() -> LogBuffer:
    """Return the process-wide ring buffer, creating it on first use."""
    global _buffer
    if _buffer is None:
        _buffer = LogBuffer()
    return _buffer


def setup_logging(name: str, level: Optional[str] = None) -> logging.Logger:
    """Configure the root logger once and return the logger called ``name``.

    The level comes from ``level``, else ``METASTAB_LOG_LEVEL``, else INFO.
    Calling this again only adjusts the level.
    """
    level_name = (level or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
    root = logging.getLogger()
    root.setLevel(getattr(logging, level_name, logging.INFO))

    buffer = get_log_buffer()
    if buffer not in root.handlers:
        stream = logging.StreamHandler(sys.stderr)
        stream.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(stream)
        root.addHandler(buffer)

    return logging.getLogger(name)
