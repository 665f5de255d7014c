"""Unit tests for the shortcut design toolkit."""
