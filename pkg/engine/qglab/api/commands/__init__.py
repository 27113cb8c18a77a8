"""Subcommand modules; each exposes register(subparsers)."""
from . import report, stage, verify

__all__ = ["report", "stage", "verify"]
