"""Utility helpers for the pmaplab package."""

from .io_helpers import dumps, read_json, write_json
from .logging_helpers import configure_logging, correlation_id, run_context, structured_log
from .random_helpers import SeededStream, seeded_stream

__all__ = [
    "structured_log",
    "correlation_id",
    "run_context",
    "configure_logging",
    "SeededStream",
    "seeded_stream",
    "dumps",
    "read_json",
    "write_json",
]
