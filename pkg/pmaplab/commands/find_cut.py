from __future__ import annotations

import argparse
import sys

from ..config import Settings
from ..services.cutfinder import find_cut_explicit, minimal_plausible_set
from ..services.oracle import PMOracle, box_from_matrix
from ..services.smallrecon import submatrix_family
from ..utils import write_json
from .base import EXIT_NEGATIVE, EXIT_OK, Command, load_matrix, register_command


@register_command
class FindCutCommand(Command):
    name = 'find-cut'
    help = 'Find a cut of a matrix through 4x4 checks, or print NO'

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--in', dest='input', required=True)
        parser.add_argument(
            '--blackbox',
            action='store_true',
            help='read the matrix only through principal minors and report a minimal plausible set',
        )

    def run(self, args: argparse.Namespace, settings: Settings) -> int:
        matrix = load_matrix(args.input)
        if args.blackbox:
            oracle = PMOracle.from_box(box_from_matrix(matrix, label='input'))
            family = submatrix_family(oracle, oracle.index) if matrix.n >= 4 else {}
            found = minimal_plausible_set(oracle.index, family)
            cut = found.subset if found is not None else None
        else:
            cut = find_cut_explicit(matrix)
        if cut is None:
            sys.stdout.write("NO\n")
            return EXIT_NEGATIVE
        write_json({'cut': list(cut)})
        return EXIT_OK
