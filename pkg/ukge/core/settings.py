import os
from typing import Optional

# Environment overrides. Nothing else is read from the environment.
LOG_LEVEL_ENV = "UKGE_LOG_LEVEL"
NUM_THREADS_ENV = "UKGE_NUM_THREADS"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def raw_log_level() -> Optional[str]:
    raw = os.getenv(LOG_LEVEL_ENV)
    return raw.strip() if raw and raw.strip() else None


def log_level_is_valid() -> bool:
    raw = raw_log_level()
    return raw is None or raw.upper() in LOG_LEVELS


def log_level(default: str = "INFO") -> str:
    """UKGE_LOG_LEVEL when it names a level, else the default."""
    raw = raw_log_level()
    if raw is None or raw.upper() not in LOG_LEVELS:
        return default
    return raw.upper()


def num_threads(default: int = 1) -> int:
    raw: Optional[str] = os.getenv(NUM_THREADS_ENV)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default
