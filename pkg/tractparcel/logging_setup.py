"""Configure application-wide logging."""

import json
import logging
import sys
from datetime import datetime, timezone

_STANDARD_ATTRS = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


def _level_names_mapping() -> dict[str, int]:
    # logging.getLevelNamesMapping() is Python 3.11+; it returns a copy of _nameToLevel.
    if hasattr(logging, "getLevelNamesMapping"):
        return logging.getLevelNamesMapping()
    return logging._nameToLevel.copy()


class JSONFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def format(self, record):
        log_obj = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_obj["exception"] = self.formatException(record.exc_info)

        # fields passed through `extra=`
        for key, value in vars(record).items():
            if key not in _STANDARD_ATTRS:
                log_obj[key] = value

        return json.dumps(log_obj, default=str)


def configure_logging(level: str = "INFO", json_path: str | None = None) -> None:
    """Configure application-wide logging.

    Console output goes to stderr so that stdout stays free for command output.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_path: Optional file that receives one JSON object per record
    """
    numeric_level = _level_names_mapping().get(level.upper())
    if numeric_level is None:
        raise ValueError(f"unknown log level {level!r}")
    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)

    # Clear existing handlers
    root_logger.handlers = []

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)
    console_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    if json_path:
        try:
            file_handler = logging.FileHandler(json_path, mode="a", encoding="utf-8")
        except OSError as e:
            root_logger.warning(f"Could not open JSON log file {json_path}: {e}")
        else:
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(JSONFormatter())
            root_logger.addHandler(file_handler)
