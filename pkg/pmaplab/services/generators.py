from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

from ..errors import InvalidInput, NotACut
from ..field import FieldSpec, Value
from ..matrix import ExactMatrix, IndexSet, cut_transpose, is_cut, is_irreducible, scc_partition
from ..utils import SeededStream
from .rod import RodInstance

TRANSPOSE = "transpose"
DIAGONAL_SIMILARITY = "diag"
CUT_TRANSPOSE = "cut-transpose"
BLOCK_PERMUTATION = "block-permutation"
PERTURB = "perturb"

PME_TRANSFORMS = (TRANSPOSE, DIAGONAL_SIMILARITY, CUT_TRANSPOSE, BLOCK_PERMUTATION, PERTURB)

_CUT_ENUMERATION_LIMIT = 16


def _random_block(field: FieldSpec, size: int, stream: SeededStream) -> List[List[Value]]:
    return [
        [field.random(stream) if r == c else field.random_nonzero(stream) for c in range(size)]
        for r in range(size)
    ]


def gen_random_dense(n: int, field: FieldSpec, stream: SeededStream) -> ExactMatrix:
    """Uniform entries with every off-diagonal entry nonzero."""
    if n < 1:
        raise InvalidInput("n must be positive", n=n)
    return ExactMatrix.build(field, _random_block(field, n, stream))


def _check_sizes(sizes: Sequence[int]) -> Tuple[int, ...]:
    parts = tuple(int(size) for size in sizes)
    n = sum(parts)
    if len(parts) < 2 or any(size < 1 for size in parts):
        raise InvalidInput("planted cuts need at least two nonempty parts", sizes=list(parts))
    for prefix in itertools.accumulate(parts[:-1]):
        if not 2 <= prefix <= n - 2:
            raise InvalidInput("every planted cut needs 2 <= |X| <= n - 2", sizes=list(parts))
    return parts


def gen_planted_cut(sizes: Sequence[int], field: FieldSpec, stream: SeededStream) -> ExactMatrix:
    """Dense matrix where every prefix union of the parts is a cut.

    Parts are dense random blocks; every block above the diagonal is p_i q_j^T
    and every block below is u_j v_i^T, so A[X, X-bar] and A[X-bar, X] have
    rank one for each prefix X.
    """
    parts = _check_sizes(sizes)
    n = sum(parts)
    starts = [0, *itertools.accumulate(parts)]
    owner = [k for k, size in enumerate(parts) for _ in range(size)]
    p, q, u, v = ([field.random_nonzero(stream) for _ in range(n)] for _ in range(4))
    blocks = [_random_block(field, size, stream) for size in parts]
    rows: List[List[Value]] = []
    for r in range(n):
        row: List[Value] = []
        for c in range(n):
            if owner[r] == owner[c]:
                k = owner[r]
                row.append(blocks[k][r - starts[k]][c - starts[k]])
            elif owner[r] < owner[c]:
                row.append(field.mul(p[r], q[c]))
            else:
                row.append(field.mul(u[r], v[c]))
        rows.append(row)
    return ExactMatrix.build(field, rows)


def gen_block_triangular(sizes: Sequence[int], field: FieldSpec, stream: SeededStream) -> ExactMatrix:
    """Dense diagonal blocks, random entries above them, zeros below."""
    parts = tuple(int(size) for size in sizes)
    if not parts or any(size < 1 for size in parts):
        raise InvalidInput("block sizes must be positive", sizes=list(parts))
    owner = [k for k, size in enumerate(parts) for _ in range(size)]
    n = len(owner)
    rows = []
    for r in range(n):
        row = []
        for c in range(n):
            if owner[r] > owner[c]:
                row.append(field.zero())
            elif r == c:
                row.append(field.random(stream))
            else:
                row.append(field.random_nonzero(stream))
        rows.append(row)
    return ExactMatrix.build(field, rows)


def gen_rod_instance(n: int, r: int, field: FieldSpec, stream: SeededStream) -> RodInstance:
    if n < 1 or r < 1:
        raise InvalidInput("n and r must be positive", n=n, r=r)

    def vector() -> Tuple[Value, ...]:
        return tuple(field.random(stream) for _ in range(r))

    b0 = tuple(vector() for _ in range(r))
    rank1 = tuple((vector(), vector()) for _ in range(n))
    return RodInstance(field, n, r, b0, rank1)


def order_gap_counterexample(n: int, field: FieldSpec) -> Tuple[ExactMatrix, ExactMatrix]:
    """A pair agreeing on every principal minor of order below n, yet not equivalent.

    A has a rank-one block A[{1,2},{3,4}] that extends to no cut, so it fails
    the rank-one extension property; B swaps A[1,2] and A[2,1].
    """
    if n < 5:
        raise InvalidInput("the counterexample needs n >= 5", n=n)
    one, two = field.one(), field.element(2)
    rows = [[one] * n for _ in range(n)]
    rows[1][0] = two
    rows[2][3] = two
    for i in range(5, n + 1):
        rows[i - 2][i - 1] = two
        rows[i - 1][i - 2] = two
    rows[0][n - 1] = two
    rows[n - 1][0] = two
    a = ExactMatrix.build(field, rows)
    b = a.with_entries({(1, 2): two, (2, 1): one})
    return a, b


# -- equivalent and perturbed partners ---------------------------------------------


def _all_cuts(matrix: ExactMatrix) -> List[IndexSet]:
    if matrix.n > _CUT_ENUMERATION_LIMIT:
        raise InvalidInput("cut enumeration is limited to n <= 16", n=matrix.n)
    return [
        subset
        for size in range(2, matrix.n - 1)
        for subset in itertools.combinations(matrix.index, size)
        if is_cut(matrix, subset)
    ]


def cut_transpose_chain(matrix: ExactMatrix, stream: SeededStream, length: int = 3) -> ExactMatrix:
    """Apply up to ``length`` cut-transposes at random cuts; stops early without a cut."""
    current = matrix
    for _ in range(length):
        if not is_irreducible(current):
            break
        cuts = _all_cuts(current)
        if not cuts:
            break
        try:
            current = cut_transpose(current, stream.choice(cuts))
        except NotACut:
            break
    return current


def diagonal_similar(matrix: ExactMatrix, stream: SeededStream) -> ExactMatrix:
    """D^-1 A D for a random invertible diagonal D."""
    field = matrix.field
    scale = [field.random_nonzero(stream) for _ in matrix.index]
    rows = [
        [field.div(field.mul(value, scale[c]), scale[r]) for c, value in enumerate(row)]
        for r, row in enumerate(matrix.rows)
    ]
    return ExactMatrix(field, matrix.index, tuple(tuple(row) for row in rows))


def block_permutation(matrix: ExactMatrix) -> ExactMatrix:
    """Keep the irreducible blocks and transpose everything between them.

    The blocks then come in the opposite order; the block partition and every
    block are unchanged.
    """
    owner = {label: k for k, block in enumerate(scc_partition(matrix)) for label in block}
    entries = {}
    for i in matrix.index:
        for j in matrix.index:
            entries[(i, j)] = matrix[i, j] if owner[i] == owner[j] else matrix[j, i]
    return ExactMatrix.from_entries(matrix.field, matrix.index, entries)


def perturb_entry(matrix: ExactMatrix, stream: SeededStream) -> ExactMatrix:
    """Replace one off-diagonal entry with a different value."""
    if matrix.n < 2:
        raise InvalidInput("perturbation needs n >= 2", n=matrix.n)
    field = matrix.field
    i, j = stream.choice([(i, j) for i in matrix.index for j in matrix.index if i != j])
    old = matrix[i, j]
    new = old
    while new == old:
        new = field.random_nonzero(stream)
    return matrix.with_entries({(i, j): new})


def pme_pair(matrix: ExactMatrix, transform: str, stream: SeededStream, *, length: int = 3) -> ExactMatrix:
    """Partner of ``matrix``: equivalent by construction except for ``perturb``."""
    if transform == TRANSPOSE:
        return matrix.transpose()
    if transform == DIAGONAL_SIMILARITY:
        return diagonal_similar(matrix, stream)
    if transform == CUT_TRANSPOSE:
        return cut_transpose_chain(matrix, stream, length)
    if transform == BLOCK_PERMUTATION:
        return block_permutation(matrix)
    if transform == PERTURB:
        return perturb_entry(matrix, stream)
    raise InvalidInput(f"unknown transform {transform!r}", choices=list(PME_TRANSFORMS))


__all__ = [
    "PME_TRANSFORMS",
    "gen_random_dense",
    "gen_planted_cut",
    "gen_block_triangular",
    "gen_rod_instance",
    "order_gap_counterexample",
    "cut_transpose_chain",
    "diagonal_similar",
    "block_permutation",
    "perturb_entry",
    "pme_pair",
]
