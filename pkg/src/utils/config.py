"""Environment configuration (STA_THREADS, STA_LOG_LEVEL, STA_LOG_FILE)."""

import logging
import os
from dataclasses import dataclass
from typing import List, Optional

from dotenv import load_dotenv

from sta.errors import ConfigurationError

# Set up logging
logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from the environment."""

    threads: int
    log_level: str = "INFO"
    log_file: Optional[str] = None

    @property
    def level(self) -> int:
        return getattr(logging, self.log_level)


def get_settings(load_env: bool = True) -> Settings:
    """Load ``.env`` and read the toolkit settings.

    Raises
    ------
        ConfigurationError: Naming every variable with an invalid value

    """
    if load_env:
        load_dotenv()

    problems: List[str] = []

    threads_raw = os.getenv("STA_THREADS")
    threads = os.cpu_count() or 1
    if threads_raw:
        try:
            threads = int(threads_raw)
            if threads < 1:
                raise ValueError
        except ValueError:
            problems.append(f"STA_THREADS must be a positive integer (got {threads_raw!r})")

    log_level = (os.getenv("STA_LOG_LEVEL") or "INFO").upper()
    if log_level not in LOG_LEVELS:
        problems.append(f"STA_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)} (got {log_level!r})")

    if problems:
        raise ConfigurationError("; ".join(problems))

    return Settings(threads=threads, log_level=log_level, log_file=os.getenv("STA_LOG_FILE") or None)
