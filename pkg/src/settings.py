"""
Environment settings

Values come from the process environment, with a `.env` file in the working
directory honoured through python-dotenv.
"""

import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    """Process-wide knobs that are not part of a scenario"""
    max_workers: int = 1
    log_level: str = "WARNING"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings once per process"""
    load_dotenv()
    try:
        max_workers = int(os.getenv("NMW_MAX_WORKERS", "1"))
    except ValueError:
        max_workers = 1
    return Settings(
        max_workers=max(1, max_workers),
        log_level=os.getenv("NMW_LOG_LEVEL", "WARNING").upper(),
    )
