from __future__ import annotations

import argparse

from ..config import Settings
from ..errors import InvalidInput
from ..field import FieldSpec
from ..services.generators import (
    PME_TRANSFORMS,
    gen_block_triangular,
    gen_planted_cut,
    gen_random_dense,
    gen_rod_instance,
    order_gap_counterexample,
    pme_pair,
)
from ..utils import seeded_stream, write_json
from .base import EXIT_OK, Command, load_matrix, parse_field, parse_sizes, register_command, require_seed

KINDS = ('dense', 'planted-cut', 'block', 'rod', 'counterexample', 'pme-pair')


def _field_for(args: argparse.Namespace, n: int) -> FieldSpec:
    return parse_field(args.field, n)


@register_command
class GenerateCommand(Command):
    name = 'gen'
    help = 'Generate matrices, ROD instances and PME test pairs'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--kind', choices=KINDS, required=True)
        parser.add_argument('--n', type=int)
        parser.add_argument('--r', type=int, help='ROD matrix size (default n)')
        parser.add_argument('--sizes', help='comma-separated part sizes, e.g. 2,3')
        parser.add_argument('--field', help='rational, prime:P or P (default: choose_prime(n))')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--in', dest='input', help='source matrix for pme-pair')
        parser.add_argument('--transform', choices=PME_TRANSFORMS, default='diag')
        parser.add_argument('--length', type=int, default=3, help='cut-transpose chain length')
        parser.add_argument('--out', help='output path (default stdout)')
        parser.add_argument('--out-b', dest='out_b', help='second matrix of a counterexample pair')

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        kind = args.kind
        if kind in {'dense', 'rod', 'counterexample'} and not args.n:
            raise InvalidInput(f"--kind {kind} needs --n")

        if kind == 'dense':
            stream = seeded_stream(require_seed(args), 'generation')
            write_json(gen_random_dense(args.n, _field_for(args, args.n), stream).to_dict(), args.out)
        elif kind in {'planted-cut', 'block'}:
            if not args.sizes:
                raise InvalidInput(f"--kind {kind} needs --sizes")
            sizes = parse_sizes(args.sizes)
            field = _field_for(args, sum(sizes))
            stream = seeded_stream(require_seed(args), 'generation')
            builder = gen_planted_cut if kind == 'planted-cut' else gen_block_triangular
            write_json(builder(sizes, field, stream).to_dict(), args.out)
        elif kind == 'rod':
            r = args.r or args.n
            stream = seeded_stream(require_seed(args), 'generation')
            rod = gen_rod_instance(args.n, r, _field_for(args, max(args.n, r)), stream)
            write_json(rod.to_dict(), args.out)
        elif kind == 'counterexample':
            a, b = order_gap_counterexample(args.n, _field_for(args, args.n))
            if args.out_b:
                write_json(a.to_dict(), args.out)
                write_json(b.to_dict(), args.out_b)
            else:
                write_json({'A': a.to_dict(), 'B': b.to_dict()}, args.out)
        else:
            if not args.input:
                raise InvalidInput("--kind pme-pair needs --in")
            matrix = load_matrix(args.input)
            stream = seeded_stream(require_seed(args), 'generation')
            write_json(pme_pair(matrix, args.transform, stream, length=args.length).to_dict(), args.out)
        return EXIT_OK
