import logging
import sys

from config import LOG_FORMAT, LOG_LEVEL

_handler: logging.Handler | None = None


def level_for(verbosity: int) -> int | str:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return LOG_LEVEL


def setup_logging(level: int | str = LOG_LEVEL) -> None:
    global _handler
    root = logging.getLogger()
    if _handler is not None:
        root.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(_handler)
    root.setLevel(level)
