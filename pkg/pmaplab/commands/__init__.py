# CLI subcommands; each module registers its Command class on import
from __future__ import annotations

import importlib
import pkgutil

from .base import Command, CommandRegistry, command_registry, register_command

_SKIP = frozenset({'base'})


def _load_command_modules() -> list[str]:
    loaded = []
    for module_info in pkgutil.iter_modules(__path__):  # type: ignore[name-defined]
        if module_info.ispkg or module_info.name in _SKIP:
            continue
        importlib.import_module(f"{__name__}.{module_info.name}")
        loaded.append(module_info.name)
    return loaded


COMMAND_MODULES = _load_command_modules()


__all__ = [
    'Command',
    'CommandRegistry',
    'COMMAND_MODULES',
    'command_registry',
    'register_command',
]
