from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Iterator
from uuid import uuid4

_LOGGER_NAME = "pmaplab.observability"

_current_correlation_id: ContextVar[str | None] = ContextVar("pmaplab_correlation_id", default=None)


def _ensure_correlation_id() -> str:
    active = _current_correlation_id.get()
    if active:
        return active
    return str(uuid4())


@contextmanager
def run_context(correlation_id: str | None = None) -> Iterator[str]:
    """Bind one correlation id to every log entry emitted inside the block."""
    cid = correlation_id or str(uuid4())
    token = _current_correlation_id.set(cid)
    try:
        yield cid
    finally:
        _current_correlation_id.reset(token)


def structured_log(event: str, *, level: int = logging.INFO, **fields: Any) -> None:
    """Emit a JSON-formatted log entry with a correlation identifier."""
    correlation_id = fields.pop("correlation_id", None) or _ensure_correlation_id()
    payload = {
        "event": event,
        "correlation_id": correlation_id,
        **fields,
    }
    logger = logging.getLogger(_LOGGER_NAME)
    logger.log(level, json.dumps(payload, sort_keys=True, default=str))


def correlation_id() -> str:
    """Return the active correlation identifier (generates one if missing)."""
    return _ensure_correlation_id()


def configure_logging(level: str | int = logging.WARNING) -> None:
    if isinstance(level, str):
        level = logging.getLevelName(level.strip().upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, format="%(message)s")
    logging.getLogger(_LOGGER_NAME).setLevel(level)
