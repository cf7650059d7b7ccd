from __future__ import annotations

import argparse

from ..config import Settings
from ..errors import InvalidInput
from ..services.rod import RodInstance, learn_rod
from ..utils import read_json, seeded_stream, write_json
from .base import EXIT_OK, Command, register_command, require_seed


@register_command
class LearnRodCommand(Command):
    name = 'learn-rod'
    help = 'Learn a rank-one decomposition of a read-once determinant from evaluations'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--in', dest='input', required=True)
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--out', help='learned instance (default stdout)')

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        payload = read_json(args.input)
        if not isinstance(payload, dict):
            raise InvalidInput("ROD JSON must be an object", path=args.input)
        rod = RodInstance.from_dict(payload)
        learned = learn_rod(rod.box(label='input'), seeded_stream(require_seed(args)), settings=settings)
        write_json(learned.to_dict(), args.out)
        return EXIT_OK
