"""MCP tools wrapping the runner commands."""

from .design_tools import design_tool, raman_tool
from .run_tools import compare_tool, propagate_tool

__all__ = [
    # Run tools
    "compare_tool",
    # Design tools
    "design_tool",
    "propagate_tool",
    "raman_tool",
]
