from __future__ import annotations

import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

from .utils import structured_log

_DEFAULT_THREADS = 1
_DEFAULT_LOG_LEVEL = "WARNING"
_DEFAULT_PMAP_RETRIES = 8
_DEFAULT_ISOLATION_RETRIES = 16
_DEFAULT_VERIFY_POINTS = 8


@dataclass(frozen=True)
class Settings:
    threads: int = _DEFAULT_THREADS
    log_level: str = _DEFAULT_LOG_LEVEL
    pmap_retries: int = _DEFAULT_PMAP_RETRIES
    isolation_retries: int = _DEFAULT_ISOLATION_RETRIES
    verify_points: int = _DEFAULT_VERIFY_POINTS
    sentry_dsn: str = ""
    environment: str = "development"

    def to_dict(self) -> dict[str, object]:
        return {
            "threads": self.threads,
            "log_level": self.log_level,
            "pmap_retries": self.pmap_retries,
            "isolation_retries": self.isolation_retries,
            "verify_points": self.verify_points,
            "environment": self.environment,
            "sentry_enabled": bool(self.sentry_dsn),
        }


def _int_env(name: str, default: int, *, minimum: int = 1) -> int:
    raw = (os.getenv(name) or "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        structured_log("config.invalid_value", level=logging.WARNING, name=name, value=raw, fallback=default)
        return default
    if value < minimum:
        structured_log("config.invalid_value", level=logging.WARNING, name=name, value=raw, fallback=default)
        return default
    return value


def load_settings(*, dotenv: bool = True) -> Settings:
    """Read settings from the environment, after an optional ``.env`` load."""
    if dotenv:
        load_dotenv(override=False)
    return Settings(
        threads=_int_env("PMAPLAB_THREADS", _DEFAULT_THREADS),
        log_level=(os.getenv("PMAPLAB_LOG_LEVEL") or _DEFAULT_LOG_LEVEL).strip().upper(),
        pmap_retries=_int_env("PMAPLAB_PMAP_RETRIES", _DEFAULT_PMAP_RETRIES),
        isolation_retries=_int_env("PMAPLAB_ISOLATION_RETRIES", _DEFAULT_ISOLATION_RETRIES),
        verify_points=_int_env("PMAPLAB_VERIFY_POINTS", _DEFAULT_VERIFY_POINTS),
        sentry_dsn=(os.getenv("SENTRY_DSN") or "").strip(),
        environment=(os.getenv("PMAPLAB_ENV") or "development").strip(),
    )


__all__ = ["Settings", "load_settings"]
