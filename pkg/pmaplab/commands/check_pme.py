from __future__ import annotations

import argparse

from ..config import Settings
from ..services.pme import PmeVerdict, pme_bruteforce, pme_randomized, test_pme
from ..utils import seeded_stream, write_json
from .base import EXIT_NEGATIVE, EXIT_OK, Command, load_matrix, register_command, require_seed

METHODS = ('det', 'brute', 'rand')


@register_command
class PmeTestCommand(Command):
    name = 'test-pme'
    help = 'Decide whether two matrices share every principal minor'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--a', required=True)
        parser.add_argument('--b', required=True)
        parser.add_argument('--method', choices=METHODS, default='det')
        parser.add_argument('--samples', type=int, default=64)
        parser.add_argument('--seed', type=int)

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        a, b = load_matrix(args.a), load_matrix(args.b)
        verdict: PmeVerdict
        if args.method == 'det':
            verdict = test_pme(a, b, settings=settings)
        elif args.method == 'brute':
            verdict = pme_bruteforce(a, b)
        else:
            verdict = pme_randomized(a, b, seeded_stream(require_seed(args), 'verify'), args.samples)
        write_json(verdict.to_dict())
        return EXIT_OK if verdict.equal else EXIT_NEGATIVE
