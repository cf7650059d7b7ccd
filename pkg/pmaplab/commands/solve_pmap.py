from __future__ import annotations

import argparse

from ..config import Settings
from ..services.oracle import box_from_matrix
from ..services.pme import pme_bruteforce
from ..services.pmap import run_blackbox_pmap
from ..utils import seeded_stream, structured_log, write_json
from .base import EXIT_OK, Command, load_matrix, register_command, require_seed

_AUDIT_LIMIT = 14


@register_command
class SolvePmapCommand(Command):
    name = 'solve-pmap'
    help = 'Learn a principal-minor-equivalent matrix from black-box access to det(A + Y)'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--in', dest='input', required=True)
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--oracle-only', action='store_true', help='skip the brute-force audit against A')
        parser.add_argument('--out', help='learned matrix (default stdout)')
        parser.add_argument('--stats', help='write query counts, retries and timings here')

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        matrix = load_matrix(args.input)
        # The solver only ever sees the box.
        box = box_from_matrix(matrix, label='input')
        run = run_blackbox_pmap(box, seeded_stream(require_seed(args)), settings=settings)
        stats = run.stats_dict()
        if not args.oracle_only and matrix.n <= _AUDIT_LIMIT:
            audit = pme_bruteforce(matrix, run.result)
            stats['audit'] = audit.to_dict()
            structured_log('pmap.audit', equal=audit.equal, n=matrix.n)
        write_json(run.result.to_dict(), args.out)
        if args.stats:
            write_json(stats, args.stats)
        return EXIT_OK
