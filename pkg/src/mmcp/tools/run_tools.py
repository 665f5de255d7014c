"""MCP tools that propagate wavefunctions."""

import logging
from typing import Any, Dict, List, Optional

from mcp.server.fastmcp import Context

from runner.commands import cmd_compare, cmd_propagate
from runner.protocol_file import load
from utils.error_handling import log_and_format_error, to_jsonable

# Set up logging
logger = logging.getLogger(__name__)


def _threads(ctx: Context) -> int:
    settings = ctx.request_context.lifespan_context.get("settings")
    return settings.threads if settings is not None else 1


async def propagate_tool(input_path: str, out_dir: str, ctx: Context) -> Dict[str, Any]:
    """Propagate every initial state of a protocol file.

    Args:
        input_path (str): Protocol file
        out_dir (str): Directory for the trajectory CSVs and summary.json
        ctx (Context): The MCP context object

    Returns:
        Dict[str, Any]: The run summary, or an error dictionary

    """
    try:
        logger.info(f"Propagating {input_path}")
        return to_jsonable(await cmd_propagate(load(input_path), out_dir, threads=_threads(ctx)))
    except Exception as e:
        return log_and_format_error(e, f"propagating {input_path}")


async def compare_tool(
    input_path: str,
    out_dir: str,
    ctx: Context,
    methods: Optional[List[str]] = None,
) -> Dict[str, Any]:
    """Run several methods on the same states and grid.

    Args:
        input_path (str): Protocol file
        out_dir (str): Directory for compare.csv and compare.json
        ctx (Context): The MCP context object
        methods (Optional[List[str]], optional): Methods to compare. Defaults to the file's list.

    Returns:
        Dict[str, Any]: The comparison, or an error dictionary

    """
    try:
        logger.info(f"Comparing methods for {input_path}")
        return to_jsonable(await cmd_compare(load(input_path), out_dir, methods=methods, threads=_threads(ctx)))
    except Exception as e:
        return log_and_format_error(e, f"comparing methods for {input_path}")
