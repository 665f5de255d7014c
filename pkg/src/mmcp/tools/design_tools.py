"""MCP tools for protocol design and Raman feasibility."""

import logging
from typing import Any, Dict

from mcp.server.fastmcp import Context

from runner.commands import cmd_design, cmd_raman
from runner.protocol_file import load
from utils.error_handling import log_and_format_error, to_jsonable

# Set up logging
logger = logging.getLogger(__name__)


async def design_tool(input_path: str, out_dir: str, ctx: Context) -> Dict[str, Any]:
    """Tabulate the inverse-engineered scaling function and trap frequency.

    Args:
        input_path (str): Protocol file with method "ii"
        out_dir (str): Directory for design.csv and design_summary.json
        ctx (Context): The MCP context object

    Returns:
        Dict[str, Any]: The design summary, or an error dictionary

    """
    try:
        logger.info(f"Designing protocol from {input_path}")
        return to_jsonable(await cmd_design(load(input_path), out_dir))
    except Exception as e:
        return log_and_format_error(e, f"designing protocol from {input_path}")


async def raman_tool(input_path: str, out_dir: str, ctx: Context) -> Dict[str, Any]:
    """Check whether a Raman pair can supply the counterdiabatic term.

    Args:
        input_path (str): Protocol file with a "raman" block
        out_dir (str): Directory for raman.json and mismatch.csv
        ctx (Context): The MCP context object

    Returns:
        Dict[str, Any]: The feasibility report, or an error dictionary

    """
    try:
        logger.info(f"Raman feasibility for {input_path}")
        return to_jsonable(await cmd_raman(load(input_path), out_dir))
    except Exception as e:
        return log_and_format_error(e, f"checking Raman feasibility for {input_path}")
