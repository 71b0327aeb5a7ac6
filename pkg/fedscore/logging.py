"""Logging for simulation runs.

Records about a client round carry structured fields (see ``ROUND_FIELDS``)
passed through ``extra=round_fields(...)``. The console and text log show
them as a short tag in front of the message, the JSON-lines log as keys.
"""

import datetime as _dt
import json
import logging as _logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, Optional

_LOGGER_NAMESPACE = "fedscore"

# order is the order of the tag and of the JSON keys
ROUND_FIELDS = ("iteration", "client", "label", "epochs_run")

_TEXT_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(round_tag)s%(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"

_COLOR_MAP = {
    _logging.DEBUG: "\033[36m",
    _logging.INFO: "\033[37m",
    _logging.WARNING: "\033[33m",
    _logging.ERROR: "\033[31m",
    _logging.CRITICAL: "\033[41m",
}
_RESET = "\033[0m"


@dataclass
class LoggingState:
    log_dir: Optional[str]
    text_log_path: Optional[str]
    jsonl_log_path: Optional[str]
    console_level: int
    file_level: int
    jsonl_enabled: bool


_state: Optional[LoggingState] = None


def round_fields(iteration: Optional[int] = None, client: Optional[str] = None,
                 label: Optional[str] = None, **more: Any) -> Dict[str, Any]:
    """``extra=`` mapping for a record about one client round; ``None`` values are dropped."""
    fields = {"iteration": iteration, "client": client, "label": label, **more}
    unknown = set(fields) - set(ROUND_FIELDS)
    if unknown:
        raise ValueError(f"unknown round fields {sorted(unknown)}")
    return {key: value for key, value in fields.items() if value is not None}


def _round_values(record: _logging.LogRecord) -> Dict[str, Any]:
    return {key: getattr(record, key) for key in ROUND_FIELDS if hasattr(record, key)}


def round_tag(record: _logging.LogRecord) -> str:
    """``[it=3 user_1/cat]`` style prefix, empty when the record has no round fields."""
    values = _round_values(record)
    if not values:
        return ""
    parts = []
    if "iteration" in values:
        parts.append(f"it={values['iteration']}")
    who = "/".join(str(values[key]) for key in ("client", "label") if key in values)
    if who:
        parts.append(who)
    if "epochs_run" in values:
        parts.append(f"epochs={values['epochs_run']}")
    return f"[{' '.join(parts)}] "


def _parse_level(value: Optional[str | int], default: int) -> int:
    if value is None:
        return default
    if isinstance(value, int):
        return value
    value = value.upper()
    if value.isdigit():
        return int(value)
    level = _logging.getLevelNamesMapping().get(value)
    if level is None:
        raise ValueError(f"Unknown log level: {value}")
    return level


class _RoundFormatter(_logging.Formatter):
    def __init__(self, use_color: bool = False) -> None:
        super().__init__(fmt=_TEXT_FORMAT, datefmt=_DATEFMT)
        self.use_color = use_color

    def format(self, record: _logging.LogRecord) -> str:
        if getattr(record, "plain", False):
            return record.getMessage()
        record.round_tag = round_tag(record)
        message = super().format(record)
        color = _COLOR_MAP.get(record.levelno) if self.use_color else None
        return f"{color}{message}{_RESET}" if color else message


class _JsonLinesFormatter(_logging.Formatter):
    def format(self, record: _logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": self.formatTime(record, _DATEFMT),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        entry.update(_round_values(record))
        if record.exc_info:
            entry["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False, default=repr)


def _log_filename(pattern: str, timestamp_format: str) -> str:
    now = _dt.datetime.now().strftime(timestamp_format)
    try:
        return pattern.format(timestamp=now, pid=os.getpid())
    except KeyError:
        return pattern.format(timestamp=now)


def _resolve_log_dir(logging_cfg: Dict[str, Any], result_dir: Optional[str], override: Optional[str]) -> Optional[str]:
    if override:
        return os.path.abspath(override)
    cfg_dir = logging_cfg.get("dir")
    if cfg_dir:
        return os.path.abspath(cfg_dir)
    if result_dir:
        return os.path.join(os.path.abspath(result_dir), logging_cfg.get("subdir", "logs"))
    # no result directory: console only
    return None


def get_logger(name: Optional[str] = None) -> _logging.Logger:
    if name is None:
        return _logging.getLogger(_LOGGER_NAMESPACE)
    if name.startswith(_LOGGER_NAMESPACE):
        return _logging.getLogger(name)
    return _logging.getLogger(f"{_LOGGER_NAMESPACE}.{name}")


def _file_handler(path: str, level: int, formatter: _logging.Formatter) -> _logging.Handler:
    handler = _logging.FileHandler(path, encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def configure_logging(
    config: Dict[str, Any],
    *,
    result_dir: Optional[str] = None,
    console_level_override: Optional[str] = None,
    log_dir_override: Optional[str] = None,
    disable_color: bool = False,
    force_reconfigure: bool = False,
) -> LoggingState:
    """Install the console handlers and, when a directory resolves, the log files.

    Records below ERROR go to stdout, the rest to stderr. A second call is a
    no-op unless ``force_reconfigure`` is set.
    """
    global _state

    logging_cfg: Dict[str, Any] = config.get("logging", {}) if config else {}
    console_level = _parse_level(console_level_override, _parse_level(logging_cfg.get("console_level"), _logging.INFO))
    file_level = _parse_level(logging_cfg.get("file_level"), _logging.DEBUG)
    use_color = logging_cfg.get("color", True) and not disable_color
    timestamp_format = logging_cfg.get("timestamp_format", "%Y%m%dT%H%M%S")
    pattern = logging_cfg.get("filename_pattern", "fedscore-{timestamp}.log")
    jsonl_enabled = bool(logging_cfg.get("jsonl", False))

    logger = get_logger()
    if logger.handlers and not force_reconfigure and _state is not None:
        return _state

    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()
    logger.setLevel(min(console_level, file_level))
    logger.propagate = False

    stdout_handler = _logging.StreamHandler(stream=sys.stdout)
    stdout_handler.setLevel(console_level)
    stdout_handler.addFilter(lambda record: record.levelno < _logging.ERROR)
    stdout_handler.setFormatter(_RoundFormatter(use_color and sys.stdout.isatty()))
    logger.addHandler(stdout_handler)

    stderr_handler = _logging.StreamHandler(stream=sys.stderr)
    stderr_handler.setLevel(max(console_level, _logging.ERROR))
    stderr_handler.setFormatter(_RoundFormatter(use_color and sys.stderr.isatty()))
    logger.addHandler(stderr_handler)

    log_dir = _resolve_log_dir(logging_cfg, result_dir, log_dir_override)
    text_log_path = None
    jsonl_log_path = None
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        text_log_path = os.path.join(log_dir, _log_filename(pattern, timestamp_format))
        logger.addHandler(_file_handler(text_log_path, file_level, _RoundFormatter()))
        if jsonl_enabled:
            jsonl_name = _log_filename(os.path.splitext(pattern)[0] + ".jsonl", timestamp_format)
            jsonl_log_path = os.path.join(log_dir, jsonl_name)
            logger.addHandler(_file_handler(jsonl_log_path, file_level, _JsonLinesFormatter()))

    _state = LoggingState(
        log_dir=log_dir,
        text_log_path=text_log_path,
        jsonl_log_path=jsonl_log_path,
        console_level=console_level,
        file_level=file_level,
        jsonl_enabled=jsonl_enabled,
    )
    return _state
