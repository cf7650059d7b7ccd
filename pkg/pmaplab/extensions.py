from __future__ import annotations

import contextvars
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from .config import Settings, load_settings

# Sentry integration for error tracking
try:
    import sentry_sdk
    SENTRY_AVAILABLE = True
except ImportError:
    SENTRY_AVAILABLE = False

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], *, threads: int | None = None) -> List[R]:
    """Apply ``fn`` to every item and return results in input order.

    Width comes from ``PMAPLAB_THREADS`` unless given; width 1 runs inline.
    """
    work = list(items)
    width = threads if threads is not None else load_settings(dotenv=False).threads
    width = max(1, min(width, len(work) or 1))
    if width == 1:
        return [fn(item) for item in work]
    # Workers keep the caller's correlation id.
    contexts = [contextvars.copy_context() for _ in work]
    with ThreadPoolExecutor(max_workers=width, thread_name_prefix="pmaplab") as pool:
        return list(pool.map(lambda ctx, item: ctx.run(fn, item), contexts, work))


def init_error_reporting(settings: Settings) -> bool:
    """Initialise Sentry when a DSN is configured and the SDK is installed."""
    if not (SENTRY_AVAILABLE and settings.sentry_dsn):
        return False
    sentry_sdk.init(
        dsn=settings.sentry_dsn,
        environment=settings.environment,
        traces_sample_rate=0.0,
        send_default_pii=False,
    )
    logger.info("Sentry initialized for environment: %s", settings.environment)
    return True


def report_exception(exc: BaseException, **tags: str) -> None:
    if not SENTRY_AVAILABLE:
        return
    if not sentry_sdk.get_client().is_active():
        return
    with sentry_sdk.new_scope() as scope:
        for key, value in tags.items():
            scope.set_tag(key, value)
        sentry_sdk.capture_exception(exc)


__all__ = ["parallel_map", "init_error_reporting", "report_exception", "SENTRY_AVAILABLE"]
