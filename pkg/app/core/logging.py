"""
Logging configuration for the QAnneal toolkit
"""
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional

from app.core.config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: Optional[str] = None, quiet: bool = False) -> None:
    """
    Set up logging configuration

    Args:
        level: Level name overriding settings.LOG_LEVEL
        quiet: Only warnings and errors reach the console
    """
    log_level = logging.WARNING if quiet else getattr(
        logging, (level or settings.LOG_LEVEL).upper(), logging.INFO
    )

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stdout)]

    if settings.LOG_TO_FILE:
        log_dir = Path(settings.LOG_DIR)
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_dir / "qanneal.log"))

    logging.basicConfig(
        level=log_level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )

    # Worker processes inherit handlers; keep their pool chatter out
    logging.getLogger("concurrent.futures").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """
    Get logger instance for a specific module

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


logger = get_logger(__name__)
