"""Tagged console logging: `[OK] ...`, `[WARN] ...`, `[FATAL ERROR] ...`.

Everything goes to stderr so stdout stays reserved for JSON/CSV results.
"""
import logging
import sys

OK = 25
logging.addLevelName(OK, "OK")

_TAGS = {
    logging.DEBUG: "DEBUG",
    logging.INFO: "INFO",
    OK: "OK",
    logging.WARNING: "WARN",
    logging.ERROR: "ERROR",
    logging.CRITICAL: "FATAL ERROR",
}

ROOT_NAME = "recon"


class TagFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        tag = _TAGS.get(record.levelno, record.levelname)
        return f"[{tag}] {record.getMessage()}"


class ToolkitLogger(logging.Logger):
    def ok(self, msg, *args, **kwargs):
        if self.isEnabledFor(OK):
            self._log(OK, msg, args, **kwargs)


def get_logger(name: str) -> ToolkitLogger:
    previous = logging.getLoggerClass()
    logging.setLoggerClass(ToolkitLogger)
    try:
        short = name.split(".", 1)[-1] if name.startswith("core.") else name
        return logging.getLogger(f"{ROOT_NAME}.{short}")
    finally:
        logging.setLoggerClass(previous)


def configure_logging(level: str | int = "INFO") -> None:
    root = logging.getLogger(ROOT_NAME)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper()) if level.upper() != "OK" else OK
        if not isinstance(level, int):
            level = logging.INFO
    root.setLevel(level)
    for handler in list(root.handlers):
        if getattr(handler, "_recon_console", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(TagFormatter())
    handler._recon_console = True
    root.addHandler(handler)
    root.propagate = False
