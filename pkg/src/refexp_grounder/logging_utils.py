"""Logging setup for the command-line entry points."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
from typing import Union

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(level: Union[str, int] = "WARNING") -> logging.Logger:
    """Routes the package loggers to a single stderr handler.

    Calling it again replaces the handler instead of stacking another one.

    Args:
        level (Union[str, int]): Level name such as "INFO" or a logging constant.

    Returns:
        logging.Logger: The package root logger.

    Raises:
        ValueError: If the level name is unknown.
    """
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"Unknown log level: {level}")
        level = resolved

    logger = logging.getLogger("refexp_grounder")
    for handler in list(logger.handlers):
        if getattr(handler, "_refexp_grounder", False):
            logger.removeHandler(handler)

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    handler._refexp_grounder = True
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
