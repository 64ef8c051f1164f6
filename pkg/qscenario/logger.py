import logging
from functools import lru_cache
from logging import Logger
from typing import Optional

from .config import get_settings

config = get_settings()


@lru_cache()
def _root_logger() -> Logger:
    logging.basicConfig(
        level=config.LOG_LEVEL,
        format=config.LOG_FORMAT,
    )
    logger = logging.getLogger(config.LOG_NAME)
    logger.setLevel(config.LOG_LEVEL)

    if config.LOG_PATH is not None:
        file_handler = logging.FileHandler(config.LOG_PATH)
        file_handler.setLevel(config.LOG_LEVEL)
        file_handler.setFormatter(logging.Formatter(config.LOG_FORMAT))
        logger.addHandler(file_handler)

    return logger


@lru_cache()
def get_logger(name: Optional[str] = None) -> Logger:
    """Setup and cache the package logger, or one of its children.

    Parameters
    ----------
    name : Optional[str], optional
        Child logger suffix, e.g. "assembly", by default None.

    Returns
    -------
    Logger
        Instance of the logger.
    """
    root = _root_logger()
    if name is None:
        return root
    return root.getChild(name)
