from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from ..combinat import shortest_cycle_through, subsets_upto
from ..config import Settings, load_settings
from ..errors import FieldTooSmall, InvalidInput, TooLarge, ZeroOffDiagonal
from ..extensions import parallel_map
from ..field import FieldSpec, Value, default_field
from ..matrix import ExactMatrix, IndexSet, adjugate, det, det_rows, index_set, scc_partition
from ..utils import SeededStream, structured_log
from .smallrecon import pme_full, pme_upto4

_BRUTEFORCE_LIMIT = 14

DETERMINISTIC = "deterministic"
BRUTEFORCE = "bruteforce"
RANDOMIZED = "randomized"
UPTO4 = "upto4"

# Diagonal entries in the index order of the matrix they shift.
Diagonal = Tuple[Value, ...]


@dataclass(frozen=True)
class PmeVerdict:
    equal: bool
    method: str
    witness: Optional[IndexSet] = None
    samples: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "equal": self.equal,
            "method": self.method,
            "witness": list(self.witness) if self.witness is not None else None,
        }
        if self.samples is not None:
            payload["samples"] = self.samples
        return payload


@dataclass(frozen=True)
class MinorGoal:
    """det((M + D)[rows outside t, cols outside s]) must not vanish.

    With M + D invertible this is the minor adj(M + D)[s, t]; empty ``s`` and
    ``t`` ask for M + D itself to be invertible.
    """

    matrix: ExactMatrix
    s: IndexSet = ()
    t: IndexSet = ()

    def value(self, diagonal: Diagonal) -> Value:
        shifted = self.matrix.plus_diagonal(diagonal)
        rows = self.matrix.complement(self.t)
        cols = self.matrix.complement(self.s)
        if not rows:
            return self.matrix.field.one()
        return det_rows(self.matrix.field, shifted.block(rows, cols))

    def holds(self, diagonal: Diagonal) -> bool:
        return self.value(diagonal) != 0


@dataclass(frozen=True)
class ShiftTarget:
    diagonal: Diagonal
    goals: Tuple[MinorGoal, ...]


def _aligned(a: ExactMatrix, b: ExactMatrix) -> Tuple[ExactMatrix, ExactMatrix]:
    """Both matrices on their sorted shared index; diagonals are then interchangeable."""
    if a.field != b.field:
        raise InvalidInput("matrices live over different fields", left=a.field.to_dict(), right=b.field.to_dict())
    if set(a.index) != set(b.index):
        raise InvalidInput("matrices must share their index", left=a.index, right=b.index)
    return a.principal(a.index), b.principal(b.index)


def first_mismatch(a: ExactMatrix, b: ExactMatrix, max_order: int) -> Optional[IndexSet]:
    """First S in size-then-lex order with det(A[S]) != det(B[S])."""
    for subset in subsets_upto(a.index, max_order):
        if a.minor(subset) != b.minor(subset):
            return subset
    return None


def _find_witness(a: ExactMatrix, b: ExactMatrix) -> Optional[IndexSet]:
    witness = first_mismatch(a, b, 4)
    if witness is None and a.n <= _BRUTEFORCE_LIMIT:
        witness = first_mismatch(a, b, a.n)
    return witness


# -- witness diagonals -------------------------------------------------------------


def _eliminate(field: FieldSpec, work: Dict[Tuple[int, int], Value], rows: List[int], cols: List[int], pivot_row: int, pivot_col: int) -> None:
    """Clear ``pivot_row`` with column operations on ``pivot_col`` and drop both."""
    pivot = work[(pivot_row, pivot_col)]
    for c in cols:
        if c == pivot_col:
            continue
        factor = field.div(work[(pivot_row, c)], pivot)
        if factor == 0:
            continue
        for r in rows:
            work[(r, c)] = field.sub(work[(r, c)], field.mul(factor, work[(r, pivot_col)]))
    rows.remove(pivot_row)
    cols.remove(pivot_col)


def nonzero_witness_minor(matrix: ExactMatrix, s: Iterable[int], t: Iterable[int]) -> Optional[Diagonal]:
    """A diagonal D with det((M + D)[T-bar, S-bar]) != 0, or None when it vanishes for every D.

    Labels outside S and T carry the variables. Row-only labels (S minus T) are
    paired with column-only labels (T minus S) through column elimination until
    at most one pair remains; that pair becomes node 0 of the support digraph of
    what is left. A shortest cycle through node 0 is the only permutation
    surviving when the variables on the cycle are set to 0, so the remaining
    variables set to one common value give a polynomial with nonzero leading
    coefficient, and a short scan finds a value where it does not vanish.
    """
    field = matrix.field
    s_set, t_set = index_set(s), index_set(t)
    if len(s_set) != len(t_set):
        raise InvalidInput("minor needs as many removed rows as columns", s=s_set, t=t_set)
    shared = [x for x in matrix.index if x not in s_set and x not in t_set]
    row_only = [x for x in s_set if x not in t_set]
    col_only = [x for x in t_set if x not in s_set]

    rows = row_only + shared
    cols = col_only + shared
    work = {(r, c): matrix[r, c] for r in rows for c in cols}
    while len(row_only) > 1:
        pivot = next(((r, c) for r in row_only for c in col_only if work[(r, c)] != 0), None)
        if pivot is None:
            raise ZeroOffDiagonal("no nonzero pivot among the fixed rows and columns", s=s_set, t=t_set)
        _eliminate(field, work, rows, cols, *pivot)
        row_only.remove(pivot[0])
        col_only.remove(pivot[1])

    on_cycle: set[int] = set()
    if row_only:
        head_row, head_col = row_only[0], col_only[0]
        position = {label: k for k, label in enumerate(shared, start=1)}
        adjacency: Dict[int, List[int]] = {0: []}
        if work[(head_row, head_col)] != 0:
            adjacency[0].append(0)
        adjacency[0].extend(position[c] for c in shared if work[(head_row, c)] != 0)
        for r in shared:
            node = position[r]
            adjacency[node] = [position[c] for c in shared if c != r and work[(r, c)] != 0]
            if work[(r, head_col)] != 0:
                adjacency[node].append(0)
        cycle = shortest_cycle_through(adjacency, 0)
        if cycle is None:
            return None
        on_cycle = {shared[node - 1] for node in cycle if node != 0}

    free = [x for x in shared if x not in on_cycle]
    goal = MinorGoal(matrix, s_set, t_set)
    for k in range(len(free) + 1):
        value = field.canonical(k)
        diagonal = tuple(value if x in free else field.zero() for x in matrix.index)
        if goal.holds(diagonal):
            return diagonal
    # Leading coefficient is nonzero, so len(free) + 1 values always suffice.
    raise AssertionError("witness scan exhausted")


# -- combining witnesses -------------------------------------------------------------


def _interpolation_weights(field: FieldSpec, nodes: Sequence[Value]) -> List[Value]:
    weights = []
    for e, x_e in enumerate(nodes):
        denominator = field.product(field.sub(x_e, x_m) for m, x_m in enumerate(nodes) if m != e)
        weights.append(field.inv(denominator))
    return weights


def _diagonal_at(
    field: FieldSpec, x: Value, nodes: Sequence[Value], weights: Sequence[Value], diagonals: Sequence[Diagonal]
) -> Diagonal:
    """Per-coordinate Lagrange interpolant through ``diagonals`` evaluated at ``x``."""
    if x in nodes:
        return diagonals[nodes.index(x)]
    span = field.product(field.sub(x, node) for node in nodes)
    coefficients = [field.div(field.mul(span, w), field.sub(x, node)) for node, w in zip(nodes, weights)]
    size = len(diagonals[0])
    return tuple(
        field.total(field.mul(c, diagonal[i]) for c, diagonal in zip(coefficients, diagonals)) for i in range(size)
    )


def lagrange_combine_diagonals(targets: Sequence[ShiftTarget], degree_bound: int) -> Diagonal:
    """One diagonal meeting every goal, each goal being met by its own target.

    The targets sit at the points 0, 1, ..., K-1 of a curve of diagonals; every
    goal is a nonzero polynomial of degree at most (K-1) * ``degree_bound``
    along it, so scanning canonical points finds a common nonvanishing one.
    """
    if not targets:
        raise InvalidInput("need at least one target diagonal")
    merged: Dict[Diagonal, List[MinorGoal]] = {}
    for target in targets:
        merged.setdefault(tuple(target.diagonal), []).extend(target.goals)
    diagonals = list(merged)
    goals = list(dict.fromkeys(goal for goal_list in merged.values() for goal in goal_list))
    field = goals[0].matrix.field if goals else None
    if field is None:
        return diagonals[0]

    count = len(diagonals)
    nodes = [field.canonical(k) for k in range(count)]
    weights = _interpolation_weights(field, nodes)
    limit = len(goals) * (count - 1) * degree_bound + 1
    for k in range(limit):
        x = field.canonical(k)
        diagonal = _diagonal_at(field, x, nodes, weights, diagonals)
        failing = next((pos for pos, goal in enumerate(goals) if not goal.holds(diagonal)), None)
        if failing is None:
            structured_log("pme.shift_combined", level=logging.DEBUG, targets=count, goals=len(goals), scanned=k + 1)
            return diagonal
        # Move the failing goal to the front; it tends to fail again.
        goals.insert(0, goals.pop(failing))
    raise FieldTooSmall("no scanned point meets every goal", scanned=limit)


def _density_targets(matrix: ExactMatrix) -> List[ShiftTarget]:
    """Invertibility of M + D and every off-diagonal entry of adj(M + D)."""
    targets = []
    invertible = nonzero_witness_minor(matrix, (), ())
    if invertible is not None:
        targets.append(ShiftTarget(invertible, (MinorGoal(matrix),)))
    for i in matrix.index:
        for j in matrix.index:
            if i == j:
                continue
            try:
                witness = nonzero_witness_minor(matrix, (i,), (j,))
            except ZeroOffDiagonal:
                witness = None
            if witness is not None:
                targets.append(ShiftTarget(witness, (MinorGoal(matrix, (i,), (j,)),)))
    return targets


def dense_adjugate_shift(a: ExactMatrix, b: ExactMatrix, *, threads: int | None = None) -> Diagonal:
    """D1 with A + D1, B + D1 invertible and both adjugates free of zero off-diagonal entries."""
    a, b = _aligned(a, b)
    per_matrix = parallel_map(_density_targets, (a, b), threads=threads)
    return lagrange_combine_diagonals([t for targets in per_matrix for t in targets], a.n)


def _pair_targets(matrix: ExactMatrix) -> List[ShiftTarget]:
    """Witness diagonals for every disjoint (S, T) whose symbolic adjugate minor is nonzero."""
    targets = []
    for s in subsets_upto(matrix.index, 2, min_size=2):
        for t in subsets_upto(matrix.index, 2, min_size=2):
            if set(s) & set(t):
                continue
            try:
                witness = nonzero_witness_minor(matrix, s, t)
            except ZeroOffDiagonal:
                continue
            if witness is not None:
                targets.append(ShiftTarget(witness, (MinorGoal(matrix, s, t),)))
    return targets


def propR_adjugate_shift(a1: ExactMatrix, b1: ExactMatrix, *, threads: int | None = None) -> Diagonal:
    """D2 such that adj(A1 + D2) and adj(B1 + D2) keep density and every symbolically
    nonzero 2x2 adjugate minor, which gives them the rank-one extension property."""
    a1, b1 = _aligned(a1, b1)
    groups = parallel_map(
        lambda job: job[0](job[1]),
        [(_density_targets, a1), (_density_targets, b1), (_pair_targets, a1), (_pair_targets, b1)],
        threads=threads,
    )
    return lagrange_combine_diagonals([t for targets in groups for t in targets], a1.n)


# -- the tester ---------------------------------------------------------------------


def _hadamard_square(matrix: ExactMatrix) -> int:
    """Square of a bound on |det| of every square submatrix of the integer lift."""
    bound = 1
    for row in matrix.rows:
        bound *= max(1, sum(int(matrix.field.lift(value)) ** 2 for value in row))
    return bound


def embed_for_shifts(a: ExactMatrix, b: ExactMatrix) -> Tuple[ExactMatrix, ExactMatrix]:
    """Move a pair over a small prime field into choose_prime(n) when its minors are small integers."""
    field = a.field
    n = a.n
    if not field.is_prime or field.has_more_than(10 * n**5 - 1):
        return a, b
    bound_square = max(_hadamard_square(a), _hadamard_square(b))
    if 4 * bound_square >= field.modulus**2:  # type: ignore[operator]
        raise FieldTooSmall(
            "field is below 10 n^5 and the minors do not fit in it as integers",
            n=n,
            modulus=field.modulus,
        )
    target = default_field(n)

    def lift(matrix: ExactMatrix) -> ExactMatrix:
        rows = [[target.element(field.lift(value)) for value in row] for row in matrix.rows]
        return ExactMatrix.build(target, rows, matrix.index)

    structured_log("pme.field_embedded", level=logging.INFO, source=field.modulus, target=target.modulus)
    return lift(a), lift(b)


def blocks_equal(a: ExactMatrix, b: ExactMatrix, *, threads: int | None = None) -> bool:
    """PME of two irreducible matrices on the same labels."""
    if a.n <= 4:
        return pme_full(a, b)
    d1 = dense_adjugate_shift(a, b, threads=threads)
    a1, b1 = adjugate(a.plus_diagonal(d1)), adjugate(b.plus_diagonal(d1))
    d2 = propR_adjugate_shift(a1, b1, threads=threads)
    a2, b2 = adjugate(a1.plus_diagonal(d2)), adjugate(b1.plus_diagonal(d2))
    return pme_upto4(a2, b2)


def test_pme(a: ExactMatrix, b: ExactMatrix, *, settings: Settings | None = None) -> PmeVerdict:
    """Deterministic principal minor equivalence test."""
    settings = settings or load_settings(dotenv=False)
    a, b = _aligned(a, b)
    blocks = scc_partition(a)
    if sorted(blocks) != sorted(scc_partition(b)):
        equal = False
    else:
        a_work, b_work = a, b
        if any(len(block) > 4 for block in blocks):
            a_work, b_work = embed_for_shifts(a, b)
        results = parallel_map(
            lambda block: blocks_equal(a_work.principal(block), b_work.principal(block), threads=1),
            blocks,
            threads=settings.threads,
        )
        equal = all(results)
    witness = None if equal else _find_witness(a, b)
    verdict = PmeVerdict(equal, DETERMINISTIC, witness)
    structured_log("pme.verdict", level=logging.INFO, **verdict.to_dict(), blocks=len(blocks))
    return verdict


test_pme.__test__ = False  # type: ignore[attr-defined]


def pme_bruteforce(a: ExactMatrix, b: ExactMatrix) -> PmeVerdict:
    a, b = _aligned(a, b)
    if a.n > _BRUTEFORCE_LIMIT:
        raise TooLarge("brute-force comparison is limited to n <= 14", n=a.n)
    witness = first_mismatch(a, b, a.n)
    return PmeVerdict(witness is None, BRUTEFORCE, witness)


def pme_order4(a: ExactMatrix, b: ExactMatrix) -> PmeVerdict:
    """Agreement of every principal minor of order at most four."""
    a, b = _aligned(a, b)
    witness = first_mismatch(a, b, 4)
    return PmeVerdict(witness is None, UPTO4, witness)


def pme_randomized(a: ExactMatrix, b: ExactMatrix, stream: SeededStream, samples: int = 64) -> PmeVerdict:
    """Compare det(A + diag(r)) and det(B + diag(r)) at random points; equal may be wrong, unequal never is."""
    a, b = _aligned(a, b)
    field = a.field
    for _ in range(samples):
        point = [field.random(stream) for _ in a.index]
        if det(a.plus_diagonal(point)) != det(b.plus_diagonal(point)):
            return PmeVerdict(False, RANDOMIZED, None, samples)
    return PmeVerdict(True, RANDOMIZED, None, samples)


__all__ = [
    "PmeVerdict",
    "MinorGoal",
    "ShiftTarget",
    "Diagonal",
    "first_mismatch",
    "nonzero_witness_minor",
    "lagrange_combine_diagonals",
    "dense_adjugate_shift",
    "propR_adjugate_shift",
    "embed_for_shifts",
    "blocks_equal",
    "test_pme",
    "pme_bruteforce",
    "pme_order4",
    "pme_randomized",
]
