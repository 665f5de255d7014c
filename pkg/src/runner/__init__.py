"""Command-line runner: protocol files, the four commands and their result files."""

from .commands import cmd_compare, cmd_design, cmd_propagate, cmd_raman, run_states
from .output import RunSummary, write_csv, write_json, write_trajectory
from .protocol_file import ProtocolFile, dump, dumps, load, loads

__all__ = [
    "ProtocolFile",
    "RunSummary",
    "cmd_compare",
    "cmd_design",
    "cmd_propagate",
    "cmd_raman",
    "dump",
    "dumps",
    "load",
    "loads",
    "run_states",
    "write_csv",
    "write_json",
    "write_trajectory",
]
