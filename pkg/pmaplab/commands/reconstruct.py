from __future__ import annotations

import argparse

from ..config import Settings
from ..errors import InvalidInput
from ..services.oracle import PMOracle
from ..services.reconstructor import ReconStats, reconstruct_prop_R, verify_property_R
from ..utils import write_json
from .base import EXIT_OK, Command, load_matrix, register_command


@register_command
class ReconstructCommand(Command):
    name = 'reconstruct'
    help = 'Rebuild a matrix with the rank-one extension property from its principal minors'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--in', dest='input', required=True)
        parser.add_argument('--assume-prop-r', action='store_true', help='skip the exhaustive property check')
        parser.add_argument('--plain-recursion', action='store_true', help='recurse on both sides of every cut')
        parser.add_argument('--out', help='reconstructed matrix (default stdout)')
        parser.add_argument('--stats', help='write recursion counters here')

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        matrix = load_matrix(args.input)
        if not args.assume_prop_r and not verify_property_R(matrix):
            raise InvalidInput("matrix lacks the rank-one extension property; pass --assume-prop-r to skip the check")
        oracle = PMOracle.from_matrix(matrix).cached()
        stats = ReconStats()
        result = reconstruct_prop_R(oracle, stats=stats, single_recursion=not args.plain_recursion)
        write_json(result.to_dict(), args.out)
        if args.stats:
            write_json({**stats.to_dict(), 'queries': oracle.queries}, args.stats)
        return EXIT_OK
