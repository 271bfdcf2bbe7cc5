"""
Logging for the transshipment optimizer.

Runs are long and mostly numeric, so progress is logged as records with
context fields (generation, archive size, evaluations, stage timings) rather
than prose. Text output shows those fields as key=value pairs after the
message; JSON output makes them top-level keys so a run log can be loaded
straight into pandas.

HANDLERS:
- stderr console, so stdout carries only CLI results
- transship_front.log and errors.log (10 MB x 5 rotation) when LOG_DIR is set
"""

import json
import logging
import logging.handlers
import os
import sys
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
ROTATE_BYTES = 10 * 1024 * 1024
ROTATE_COUNT = 5


class JsonFormatter(logging.Formatter):
    """One JSON object per record; context fields become top-level keys."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = dict(getattr(record, 'extra_fields', None) or {})
        entry.update(
            timestamp=datetime.fromtimestamp(record.created, timezone.utc).isoformat().replace('+00:00', 'Z'),
            level=record.levelname,
            logger=record.name,
            message=record.getMessage(),
            module=record.module,
            function=record.funcName,
            line=record.lineno,
        )
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        # numpy scalars and paths in context fields
        return json.dumps(entry, default=str)


class ContextFormatter(logging.Formatter):
    """Plain-text formatter that appends context fields as key=value pairs."""

    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        fields = getattr(record, 'extra_fields', None)
        if fields:
            pairs = " ".join(f"{key}={value}" for key, value in fields.items())
            message = f"{message} [{pairs}]"
        return message


def _rotating_handler(path: Path, level: int, formatter: logging.Formatter) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        path, maxBytes=ROTATE_BYTES, backupCount=ROTATE_COUNT, encoding='utf-8'
    )
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logging(
    level: str = "INFO",
    log_dir: Optional[str] = None,
    json_format: bool = False,
    console: bool = True
) -> logging.Logger:
    """
    Configure the root logger for a run; calling it again replaces all handlers.

    Args:
        level: DEBUG shows solver pivots and pool draws, INFO shows progress
        log_dir: Directory for the rotating log files (None = console only)
        json_format: Emit JSON records instead of text
        console: Log to stderr

    Returns:
        The root logger
    """
    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    root.handlers.clear()

    formatter: logging.Formatter = (
        JsonFormatter() if json_format else ContextFormatter(fmt=TEXT_FORMAT, datefmt=DATE_FORMAT)
    )

    if console:
        stream = logging.StreamHandler(sys.stderr)
        stream.setLevel(logging.DEBUG)
        stream.setFormatter(formatter)
        root.addHandler(stream)

    if log_dir:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        root.addHandler(_rotating_handler(log_path / "transship_front.log", logging.DEBUG, formatter))
        root.addHandler(_rotating_handler(log_path / "errors.log", logging.ERROR, formatter))

    return root


def get_logger(name: str) -> logging.Logger:
    """Module logger; call with ``__name__``."""
    return logging.getLogger(name)


def log_with_context(logger: logging.Logger, level: str, message: str, **context):
    """
    Log ``message`` with context fields attached to the record.

    Both formatters read the fields from ``record.extra_fields``; context keys
    never replace the standard JSON keys (timestamp, level, message, ...).

    Args:
        logger: Target logger
        level: debug, info, warning, error or critical
        message: Short event name, e.g. "generation 3 done"
        **context: Counters and identifiers of the event
    """
    getattr(logger, level.lower())(message, extra={'extra_fields': context})


@contextmanager
def stage_timer(logger: logging.Logger, stage: str, **context) -> Iterator[Dict[str, Any]]:
    """
    Log the start and wall-clock duration of a pipeline stage.

    The yielded dict is merged into the completion record, so a stage can
    report what it produced (front size, evaluations, rows written).
    Failures are logged at ERROR with the elapsed time and re-raised.
    """
    result: Dict[str, Any] = {}
    log_with_context(logger, "info", f"{stage} started", stage=stage, **context)
    start = time.perf_counter()
    try:
        yield result
    except Exception:
        elapsed = round(time.perf_counter() - start, 3)
        log_with_context(logger, "error", f"{stage} failed", stage=stage, seconds=elapsed, **context)
        raise
    elapsed = round(time.perf_counter() - start, 3)
    log_with_context(logger, "info", f"{stage} finished", stage=stage, seconds=elapsed, **{**context, **result})


# Environment defaults until the CLI reconfigures with --log-level
setup_logging(
    level=os.getenv("LOG_LEVEL", "INFO"),
    log_dir=os.getenv("LOG_DIR") or None,
    json_format=os.getenv("LOG_JSON", "false").lower() == "true",
)
