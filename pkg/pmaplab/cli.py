"""Command-line entry point: ``pmaplab <command> [options]``.

Exit codes: 0 success or positive verdict, 1 negative verdict (NO cut, not
equivalent), 2 error. Errors are printed to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from . import __version__
from .commands import command_registry
from .commands.base import EXIT_ERROR
from .config import load_settings
from .errors import PmaplabError
from .extensions import init_error_reporting, report_exception
from .utils import configure_logging, dumps, run_context, structured_log


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pmaplab',
        description='Exact black-box principal minor assignment, ROD learning and equivalence testing',
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    command_registry.install(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = load_settings()
    configure_logging(settings.log_level)
    init_error_reporting(settings)

    command = args.command_cls()

    with run_context() as cid:
        structured_log('cli.command_started', command=command.name, threads=settings.threads)
        try:
            code = command.run(args, settings)
        except PmaplabError as exc:
            structured_log('cli.command_failed', level=logging.WARNING, command=command.name, error=type(exc).__name__)
            sys.stderr.write(dumps({**exc.to_dict(), 'correlation_id': cid}))
            return EXIT_ERROR
        except Exception as exc:  # noqa: BLE001
            structured_log('cli.command_crashed', level=logging.ERROR, command=command.name, error=repr(exc))
            report_exception(exc, command=command.name, correlation_id=cid)
            sys.stderr.write(dumps({'error': type(exc).__name__, 'message': str(exc), 'correlation_id': cid}))
            return EXIT_ERROR
        structured_log('cli.command_finished', command=command.name, exit_code=code)
        return code


__all__ = ['build_parser', 'main']
