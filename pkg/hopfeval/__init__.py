# -*- coding: utf-8 -*-
import logging

from . import config

__version__ = "1.0.0"

logger = logging.getLogger(__name__)


def setup_logging(level: str = None):
    """Настраивает корневой логгер так же, как это делает приложение при старте."""
    logging.basicConfig(
        level=level or config.LOG_LEVEL,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    logger.debug(f"Logging configured at level {level or config.LOG_LEVEL}")
