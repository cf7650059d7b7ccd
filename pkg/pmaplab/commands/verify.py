from __future__ import annotations

import argparse

from ..config import Settings
from ..services.pme import pme_bruteforce, pme_order4, pme_randomized
from ..utils import seeded_stream, write_json
from .base import EXIT_NEGATIVE, EXIT_OK, Command, load_matrix, register_command, require_seed

MODES = ('brute', 'upto4', 'rand')


@register_command
class VerifyCommand(Command):
    name = 'verify'
    help = 'Compare two matrices with one of the reference checks'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--a', required=True)
        parser.add_argument('--b', required=True)
        parser.add_argument('--mode', choices=MODES, default='brute')
        parser.add_argument('--samples', type=int, default=64)
        parser.add_argument('--seed', type=int)

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        a, b = load_matrix(args.a), load_matrix(args.b)
        if args.mode == 'brute':
            verdict = pme_bruteforce(a, b)
        elif args.mode == 'upto4':
            verdict = pme_order4(a, b)
        else:
            verdict = pme_randomized(a, b, seeded_stream(require_seed(args), 'verify'), args.samples)
        write_json(verdict.to_dict())
        return EXIT_OK if verdict.equal else EXIT_NEGATIVE
