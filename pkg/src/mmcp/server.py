"""MCP server exposing the design, propagate, raman and compare commands over stdio."""

import argparse
import logging
from collections.abc import AsyncIterator
from contextlib import asynccontextmanager
from typing import Any, Dict, List, Optional

from mcp.server.fastmcp import Context, FastMCP
from mcp.server.fastmcp.prompts import base

from sta.dynamics import METHODS
from utils.config import Settings, get_settings
from utils.logging import configure_logging

from mmcp.tools import compare_tool, design_tool, propagate_tool, raman_tool

# Get logger
logger = logging.getLogger(__name__)

SERVER_VERSION = "1.0.0"


@asynccontextmanager
async def sta_lifespan(server: FastMCP) -> AsyncIterator[Dict[str, Settings]]:
    """Load the settings once for the lifetime of the server.

    Args:
        server (FastMCP): The FastMCP server instance

    Yields:
        Dict[str, Settings]: The lifespan context holding the settings

    """
    logger.info(f"MCP server starting up (server: {server.name})")
    settings = get_settings()
    logger.info(f"Threads per command: {settings.threads}")
    try:
        yield {"settings": settings}
    finally:
        logger.info("MCP server shutting down")


# Create a FastMCP server with a descriptive name and lifespan manager
app = FastMCP(
    "Shortcut Design Server",
    lifespan=sta_lifespan,
    dependencies=["numpy", "scipy", "python-dotenv"],
)


# === Define MCP Resources ===


@app.resource("sta://config")
def get_sta_config() -> Dict[str, Any]:
    """Return the server configuration.

    Returns
    -------
        Dict[str, Any]: Version, methods and the settings read from the environment

    """
    settings = get_settings()
    return {
        "version": SERVER_VERSION,
        "methods": list(METHODS),
        "threads": settings.threads,
        "log_level": settings.log_level,
        "commands": ["design", "propagate", "raman", "compare"],
    }


# === Define MCP Tools ===


@app.tool("sta_design")
async def sta_design_tool(input_path: str, out_dir: str, ctx: Context) -> Dict[str, Any]:
    """Tabulate b(t), its derivatives and omega^2(t) for an inverse-engineered protocol.

    Args:
        input_path (str): Path of a protocol file with method "ii".
        out_dir (str): Directory for the result files.
        ctx (Context): The MCP context object.

    Returns:
        Dict[str, Any]: The design summary.

    """
    await ctx.info(f"Designing protocol: {input_path}")
    return await design_tool(input_path, out_dir, ctx)


@app.tool("sta_propagate")
async def sta_propagate_tool(input_path: str, out_dir: str, ctx: Context) -> Dict[str, Any]:
    """Propagate every initial state and write one trajectory CSV per state.

    Args:
        input_path (str): Path of a protocol file.
        out_dir (str): Directory for the result files.
        ctx (Context): The MCP context object.

    Returns:
        Dict[str, Any]: The run summary with final fidelities.

    """
    await ctx.info(f"Propagating: {input_path}")
    return await propagate_tool(input_path, out_dir, ctx)


@app.tool("sta_raman")
async def sta_raman_tool(input_path: str, out_dir: str, ctx: Context) -> Dict[str, Any]:
    """Report effective Raman parameters, sideband flags and the tracking mismatch.

    Args:
        input_path (str): Path of a protocol file with a "raman" block.
        out_dir (str): Directory for the result files.
        ctx (Context): The MCP context object.

    Returns:
        Dict[str, Any]: The feasibility report.

    """
    await ctx.info(f"Raman feasibility: {input_path}")
    return await raman_tool(input_path, out_dir, ctx)


@app.tool("sta_compare")
async def sta_compare_tool(
    input_path: str,
    out_dir: str,
    ctx: Context,
    methods: Optional[List[str]] = None,
) -> Dict[str, Any]:
    """Compare methods from the same initial states on the same grid.

    Args:
        input_path (str): Path of a protocol file.
        out_dir (str): Directory for the result files.
        ctx (Context): The MCP context object.
        methods (List[str], optional): At least two of ii, tt, tt-bare, plain.

    Returns:
        Dict[str, Any]: Final fidelities, population deviations and runtimes per method.

    """
    await ctx.info(f"Comparing {methods or 'file methods'}: {input_path}")
    return await compare_tool(input_path, out_dir, ctx, methods)


# === Define MCP Prompts ===


@app.prompt()
def design_shortcut_prompt() -> list[base.Message]:
    """Prompt for designing a fast trap expansion.

    Returns
    -------
        list[base.Message]: A list of prompt messages.

    """
    return [
        base.UserMessage("Please design a fast expansion of the harmonic trap and check it:"),
        base.UserMessage("1. Run sta_design and look for expulsive intervals"),
        base.UserMessage("2. Run sta_propagate and check the final fidelities"),
        base.UserMessage("3. Run sta_compare against the plain ramp"),
        base.AssistantMessage("I'll start with the design summary."),
    ]


def main(argv: Optional[List[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="Run the shortcut design MCP server (stdio).")
    parser.add_argument("--log-file", type=str, help="Also log to this file")
    parser.add_argument("--verbose", action="store_true", help="Log at debug level")
    args = parser.parse_args(argv)

    settings = get_settings()
    configure_logging(
        level=logging.DEBUG if args.verbose else settings.level,
        log_file=args.log_file or settings.log_file,
    )
    app.run()


# Add run capability if executed directly
if __name__ == "__main__":
    main()
