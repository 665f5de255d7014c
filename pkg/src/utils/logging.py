"""Logging utilities for the command line and the MCP server."""

import json
import logging
import os
import sys
from typing import Any, Dict, Optional, Union


def configure_logging(
    level: int = logging.INFO,
    log_file: Optional[str] = None,
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
) -> None:
    """Configure logging for the application.

    Logs go to stderr: stdout carries CLI tables and the MCP stdio channel.

    Args:
        level (int, optional): Logging level. Defaults to logging.INFO.
        log_file (Optional[str], optional): Path to log file. Defaults to None (console only).
        log_format (str, optional): Log message format. Defaults to standard format with timestamp.

    """
    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in list(root_logger.handlers):
        if getattr(handler, "_sta_handler", False):
            root_logger.removeHandler(handler)

    formatter = logging.Formatter(log_format)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler._sta_handler = True
    root_logger.addHandler(console_handler)

    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        file_handler._sta_handler = True
        root_logger.addHandler(file_handler)


def log_command(
    logger: logging.Logger,
    command: str,
    subject: str,
    options: Optional[Dict[str, Any]] = None,
) -> None:
    """Log the start of a command.

    Args:
        logger (logging.Logger): The logger to use
        command (str): Command name
        subject (str): What the command runs on
        options (Optional[Dict[str, Any]], optional): Command options. Defaults to None.

    """
    logger.info(f"Running {command} for {subject}")
    if options and logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"Options: {json.dumps(options, default=str)}")


def log_result(
    logger: logging.Logger,
    command: str,
    payload: Union[str, Dict[str, Any]],
    max_length: int = 200,
) -> None:
    """Log a (truncated) command result at debug level.

    Args:
        logger (logging.Logger): The logger to use
        command (str): Command name
        payload (Union[str, Dict[str, Any]]): Result text or dictionary
        max_length (int, optional): Maximum length of the logged text. Defaults to 200.

    """
    text = payload if isinstance(payload, str) else json.dumps(payload, default=str)
    truncated = text[:max_length] + "..." if len(text) > max_length else text
    logger.debug(f"Result of {command}: {truncated}")


def log_error(
    logger: logging.Logger,
    error: Union[str, Exception],
    context: Optional[str] = None,
) -> None:
    """Log an error with context.

    Args:
        logger (logging.Logger): The logger to use
        error (Union[str, Exception]): The error to log
        context (Optional[str], optional): Additional context. Defaults to None.

    """
    context_str = f" during {context}" if context else ""
    if isinstance(error, Exception):
        logger.error(f"Error{context_str}: {error.__class__.__name__}: {error!s}")
    else:
        logger.error(f"Error{context_str}: {error}")
