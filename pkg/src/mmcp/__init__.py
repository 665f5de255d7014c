"""MCP server exposing the shortcut design commands."""
