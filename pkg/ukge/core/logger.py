import logging
import sys
from typing import Optional

from ukge.core.settings import LOG_LEVEL_ENV, log_level, log_level_is_valid, raw_log_level

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(module)s:%(funcName)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_override: Optional[str] = None
_warned_env_level = False


def get_logger(name: str) -> logging.Logger:
    """
    Logger writing `time | level | module:function:line | message` lines to stdout.
    Level comes from --log-level when given, else UKGE_LOG_LEVEL, else INFO.
    """
    global _warned_env_level
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(_override or log_level())
    logger.propagate = False

    if not log_level_is_valid() and not _warned_env_level:
        _warned_env_level = True
        logger.warning(f"[LOGGING] {LOG_LEVEL_ENV}={raw_log_level()!r} is not a level name | using=INFO")
    return logger


def set_global_level(level: str) -> None:
    """Apply a level to every ukge logger, including ones created later."""
    global _override
    _override = level.upper()
    for name, existing in logging.Logger.manager.loggerDict.items():
        if name.startswith("ukge") and isinstance(existing, logging.Logger):
            existing.setLevel(_override)
