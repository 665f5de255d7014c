"""Utility functions shared by the command line and the MCP server."""

from .config import Settings, get_settings
from .error_handling import (
    format_error_response,
    is_error_response,
    log_and_format_error,
    safe_json_dumps,
    to_jsonable,
)
from .logging import configure_logging, log_command, log_error, log_result

__all__ = [
    # Configuration
    "Settings",
    # Logging
    "configure_logging",
    # Error Handling
    "format_error_response",
    "get_settings",
    "is_error_response",
    "log_and_format_error",
    "log_command",
    "log_error",
    "log_result",
    "safe_json_dumps",
    "to_jsonable",
]
