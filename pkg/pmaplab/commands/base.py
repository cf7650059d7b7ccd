from __future__ import annotations

import argparse
import threading
from typing import Dict

from ..config import Settings
from ..errors import InvalidField, InvalidInput
from ..field import FieldSpec, default_field
from ..matrix import ExactMatrix
from ..utils import read_json

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


class Command:
    """Base class for CLI subcommands.

    Subclasses define a unique ``name`` and implement ``add_arguments`` and
    ``run``; ``run`` returns the process exit code.
    """

    name: str = ''
    help: str = ''

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        raise NotImplementedError


class CommandRegistry:
    """Subcommand classes by name; also wires them into an argparse parser.

    Instances are created per invocation through ``create``, so a command
    carries no state between runs.
    """

    def __init__(self) -> None:
        self._classes: Dict[str, type[Command]] = {}
        self._lock = threading.Lock()

    def register(self, command_cls: type[Command]) -> type[Command]:
        name = (command_cls.name or '').strip().lower()
        if not name:
            raise ValueError(f"Command {command_cls.__name__} must define a non-empty name")
        with self._lock:
            existing = self._classes.get(name)
            if existing is not None and existing is not command_cls:
                raise ValueError(f"Duplicate command name {name!r}: {existing.__name__} and {command_cls.__name__}")
            self._classes[name] = command_cls
        return command_cls

    def names(self) -> list[str]:
        return sorted(self._classes)

    def command_class(self, name: str) -> type[Command] | None:
        return self._classes.get(name.lower())

    def create(self, name: str) -> Command:
        command_cls = self.command_class(name)
        if command_cls is None:
            raise InvalidInput(f"unknown command {name!r}", known=self.names())
        return command_cls()

    def install(self, subparsers: argparse._SubParsersAction) -> None:
        """One subparser per command; the parsed namespace carries ``command_cls``."""
        for name in self.names():
            command_cls = self._classes[name]
            sub = subparsers.add_parser(name, help=command_cls.help, description=command_cls.help)
            command_cls().add_arguments(sub)
            sub.set_defaults(command_cls=command_cls)


command_registry = CommandRegistry()


def register_command(command_cls: type[Command]) -> type[Command]:
    """Class decorator to register CLI subcommands."""
    return command_registry.register(command_cls)


# -- shared argument handling ------------------------------------------------------


def parse_field(text: str | None, n: int) -> FieldSpec:
    """``rational``, ``prime:P`` or a bare prime; empty picks choose_prime(n)."""
    raw = (text or '').strip().lower()
    if raw in {'', 'auto'}:
        return default_field(n)
    if raw in {'q', 'rational'}:
        return FieldSpec.rational()
    if raw.startswith('prime:'):
        raw = raw.split(':', 1)[1]
    try:
        return FieldSpec.prime(int(raw))
    except ValueError as exc:
        raise InvalidField(f"cannot parse field {text!r}") from exc


def parse_sizes(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise InvalidInput(f"sizes must be comma-separated integers, got {text!r}") from exc


def load_matrix(path: str) -> ExactMatrix:
    payload = read_json(path)
    if not isinstance(payload, dict):
        raise InvalidInput("matrix JSON must be an object", path=path)
    return ExactMatrix.from_dict(payload)


def require_seed(args: argparse.Namespace) -> int:
    if getattr(args, 'seed', None) is None:
        raise InvalidInput("this command draws random values and needs --seed")
    return int(args.seed)


__all__ = [
    'Command',
    'CommandRegistry',
    'command_registry',
    'register_command',
    'parse_field',
    'parse_sizes',
    'load_matrix',
    'require_seed',
    'EXIT_OK',
    'EXIT_NEGATIVE',
    'EXIT_ERROR',
]
