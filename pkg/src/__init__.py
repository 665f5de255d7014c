"""Shortcuts to adiabaticity for a harmonic trap.

Inverse-invariant design, transitionless tracking and a split-operator propagator that checks
both, with a command line and an MCP server on top.
"""

__version__ = "0.2.0"
